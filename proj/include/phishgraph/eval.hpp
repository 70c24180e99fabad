#pragma once

#include <map>
#include <string>
#include <vector>

#include "phishgraph/lbp.hpp"

namespace phishgraph {

// Confusion counts in the benign-positive convention: TP is a benign URL
// predicted benign, TN a phishing URL predicted phishing. Set
// `phishing_positive` in `confusion` to flip for external comparisons.
struct ConfusionCounts {
    size_t tp = 0, fp = 0, tn = 0, fn = 0;
    size_t total() const { return tp + fp + tn + fn; }
};

struct MetricSet {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // a zero-denominator metric was reported as 0
};

struct SweepRow {
    double threshold = 0.0;
    ConfusionCounts counts;
    MetricSet metrics;
    double tpr = 0.0;
    double fpr = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double best_f1_threshold = 0.0;
    double best_f1 = 0.0;
};

// Throws DataError listing missing URLs when the key sets differ.
ConfusionCounts confusion(const std::map<std::string, int>& predictions,
                          const std::map<std::string, int>& truth,
                          bool phishing_positive = false);

// accuracy/precision/recall/F1 with zero denominators reported as 0 and
// flagged. Throws DataError on empty counts.
MetricSet metrics(const ConfusionCounts& c);

// Reclassifies stored phish_scores at each threshold. Rows keep the input
// threshold order (must be strictly increasing); the argmax-F1 threshold is
// reported alongside.
SweepReport threshold_sweep(const std::map<std::string, double>& phish_scores,
                            const std::map<std::string, int>& truth,
                            const std::vector<double>& thresholds,
                            bool phishing_positive = false);

struct CvAggregate {
    std::vector<MetricSet> per_fold;
    MetricSet mean_of_folds;        // unweighted mean across folds
    MetricSet pooled;               // metrics of the summed confusion table
    ConfusionCounts pooled_counts;
};

CvAggregate aggregate_cv(const std::vector<MetricSet>& fold_metrics,
                         const std::vector<ConfusionCounts>& fold_counts);

// `threshold,tp,fp,tn,fn,accuracy,precision,recall,f1,tpr,fpr`
void save_sweep_csv(const SweepReport& report, const std::string& path);

}  // namespace phishgraph
