#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phishgraph {

struct UrlRecord {
    std::string url;
    int label = 0;  // 0 benign, 1 phishing
};

struct DatasetSummary {
    size_t benign_count = 0;
    size_t phishing_count = 0;
    size_t duplicate_urls = 0;  // extra occurrences beyond the first
};

struct Dataset {
    std::vector<UrlRecord> records;
    DatasetSummary summary;
};

// Deterministic stratified fold assignment. assignments[i] is the fold of
// records[i]; regeneration with the same seed yields the same plan.
struct FoldPlan {
    int n_folds = 0;
    uint64_t seed = 0;
    std::vector<int> assignments;
};

// Reads a `url,label` CSV. Duplicate URLs are kept and counted in the
// summary. Throws DataError for malformed rows (named by line number),
// labels outside {0,1}, invalid UTF-8, or an empty dataset.
Dataset load_dataset(const std::string& path);

// Per-class shuffle (splitmix-seeded) followed by round-robin assignment,
// so per-class fold sizes differ by at most one. Throws DataError when a
// class has fewer members than n_folds or n_folds < 2.
FoldPlan make_folds(const std::vector<UrlRecord>& records, int n_folds, uint64_t seed);

}  // namespace phishgraph
