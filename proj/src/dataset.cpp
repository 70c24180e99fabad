#include "phishgraph/dataset.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "phishgraph/common.hpp"
#include "phishgraph/csv.hpp"
#include "phishgraph/rng.hpp"

namespace phishgraph {

namespace {

// checks a byte string is well-formed UTF-8
bool valid_utf8(const std::string& s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        size_t extra;
        if (c < 0x80) extra = 0;
        else if ((c & 0xE0) == 0xC0) extra = 1;
        else if ((c & 0xF0) == 0xE0) extra = 2;
        else if ((c & 0xF8) == 0xF0) extra = 3;
        else return false;
        if (i + extra >= s.size() && extra > 0) return false;
        for (size_t k = 1; k <= extra; ++k) {
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        }
        i += extra + 1;
    }
    return true;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset: " + path);
    line = strip_cr(line);
    if (line != "url,label") {
        throw DataError("dataset header must be 'url,label', got '" + line + "' in " + path);
    }

    Dataset ds;
    std::unordered_set<std::string> seen;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (!valid_utf8(line)) {
            throw DataError("invalid UTF-8 at line " + std::to_string(line_no));
        }
        auto fields = csv::split_line(line);
        if (fields.size() != 2) {
            throw DataError("expected 2 columns at line " + std::to_string(line_no) + ", got " +
                            std::to_string(fields.size()));
        }
        const std::string& url = fields[0];
        const std::string& label_str = fields[1];
        if (url.empty()) throw DataError("empty url at line " + std::to_string(line_no));
        int label;
        if (label_str == "0") label = 0;
        else if (label_str == "1") label = 1;
        else throw DataError("invalid label at line " + std::to_string(line_no));

        if (!seen.insert(url).second) ++ds.summary.duplicate_urls;
        if (label == 0) ++ds.summary.benign_count;
        else ++ds.summary.phishing_count;
        ds.records.push_back(UrlRecord{url, label});
    }
    if (ds.records.empty()) throw DataError("empty dataset: " + path);
    return ds;
}

FoldPlan make_folds(const std::vector<UrlRecord>& records, int n_folds, uint64_t seed) {
    if (n_folds < 2) throw DataError("n_folds must be >= 2");

    std::vector<size_t> by_class[2];
    for (size_t i = 0; i < records.size(); ++i) {
        by_class[records[i].label].push_back(i);
    }
    for (int c = 0; c < 2; ++c) {
        if (by_class[c].size() < static_cast<size_t>(n_folds)) {
            throw DataError("class " + std::to_string(c) + " has " +
                            std::to_string(by_class[c].size()) + " members, fewer than n_folds=" +
                            std::to_string(n_folds));
        }
    }

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignments.assign(records.size(), -1);
    for (int c = 0; c < 2; ++c) {
        SplitMix64 rng(derive_seed(seed, "folds", static_cast<uint64_t>(c)));
        deterministic_shuffle(by_class[c], rng);
        for (size_t i = 0; i < by_class[c].size(); ++i) {
            plan.assignments[by_class[c][i]] = static_cast<int>(i % n_folds);
        }
    }
    return plan;
}

}  // namespace phishgraph
