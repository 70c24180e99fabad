#include "phishgraph/eval.hpp"

#include <algorithm>
#include <fstream>

#include "phishgraph/common.hpp"

namespace phishgraph {

ConfusionCounts confusion(const std::map<std::string, int>& predictions,
                          const std::map<std::string, int>& truth, bool phishing_positive) {
    std::string missing;
    for (const auto& [url, _] : truth) {
        if (!predictions.count(url)) missing += (missing.empty() ? "" : ", ") + url;
    }
    for (const auto& [url, _] : predictions) {
        if (!truth.count(url)) missing += (missing.empty() ? "" : ", ") + url;
    }
    if (!missing.empty()) throw DataError("prediction/truth key mismatch: " + missing);

    // positive class: benign (0) by default, phishing (1) when flipped
    int positive = phishing_positive ? 1 : 0;
    ConfusionCounts c;
    for (const auto& [url, actual] : truth) {
        int predicted = predictions.at(url);
        bool actual_pos = (actual == positive);
        bool predicted_pos = (predicted == positive);
        if (actual_pos && predicted_pos) ++c.tp;
        else if (!actual_pos && predicted_pos) ++c.fp;
        else if (!actual_pos && !predicted_pos) ++c.tn;
        else ++c.fn;
    }
    return c;
}

MetricSet metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw DataError("metrics over empty confusion counts");
    MetricSet m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        m.degenerate = true;
    }
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        m.degenerate = true;
    }
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.degenerate = true;
    }
    return m;
}

SweepReport threshold_sweep(const std::map<std::string, double>& phish_scores,
                            const std::map<std::string, int>& truth,
                            const std::vector<double>& thresholds, bool phishing_positive) {
    if (thresholds.empty()) throw DataError("threshold sweep requires at least one threshold");
    for (size_t i = 1; i < thresholds.size(); ++i) {
        if (thresholds[i] <= thresholds[i - 1]) {
            throw DataError("sweep thresholds must be strictly increasing");
        }
    }
    for (const auto& [url, _] : truth) {
        if (!phish_scores.count(url)) throw DataError("missing phish_score for " + url);
    }

    SweepReport report;
    for (double t : thresholds) {
        std::map<std::string, int> predictions;
        for (const auto& [url, _] : truth) {
            predictions[url] = (phish_scores.at(url) >= t) ? 1 : 0;
        }
        SweepRow row;
        row.threshold = t;
        row.counts = confusion(predictions, truth, phishing_positive);
        row.metrics = metrics(row.counts);
        const auto& c = row.counts;
        row.tpr = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                                    : 0.0;
        row.fpr = (c.fp + c.tn) > 0 ? static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn)
                                    : 0.0;
        report.rows.push_back(row);
    }
    // independent argmax-F1 scan; earliest threshold wins ties
    report.best_f1 = -1.0;
    for (const auto& row : report.rows) {
        if (row.metrics.f1 > report.best_f1) {
            report.best_f1 = row.metrics.f1;
            report.best_f1_threshold = row.threshold;
        }
    }
    return report;
}

CvAggregate aggregate_cv(const std::vector<MetricSet>& fold_metrics,
                         const std::vector<ConfusionCounts>& fold_counts) {
    if (fold_metrics.empty()) throw DataError("aggregate_cv requires at least one fold");
    if (fold_metrics.size() != fold_counts.size()) {
        throw DataError("aggregate_cv fold metric/count size mismatch");
    }
    CvAggregate agg;
    agg.per_fold = fold_metrics;
    for (const auto& m : fold_metrics) {
        agg.mean_of_folds.accuracy += m.accuracy;
        agg.mean_of_folds.precision += m.precision;
        agg.mean_of_folds.recall += m.recall;
        agg.mean_of_folds.f1 += m.f1;
        agg.mean_of_folds.degenerate = agg.mean_of_folds.degenerate || m.degenerate;
    }
    double n = static_cast<double>(fold_metrics.size());
    agg.mean_of_folds.accuracy /= n;
    agg.mean_of_folds.precision /= n;
    agg.mean_of_folds.recall /= n;
    agg.mean_of_folds.f1 /= n;
    for (const auto& c : fold_counts) {
        agg.pooled_counts.tp += c.tp;
        agg.pooled_counts.fp += c.fp;
        agg.pooled_counts.tn += c.tn;
        agg.pooled_counts.fn += c.fn;
    }
    agg.pooled = metrics(agg.pooled_counts);
    return agg;
}

void save_sweep_csv(const SweepReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write sweep file: " + path);
    out << "threshold,tp,fp,tn,fn,accuracy,precision,recall,f1,tpr,fpr\n";
    char buf[256];
    for (const auto& row : report.rows) {
        snprintf(buf, sizeof(buf), "%.17g,%zu,%zu,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 row.threshold, row.counts.tp, row.counts.fp, row.counts.tn, row.counts.fn,
                 row.metrics.accuracy, row.metrics.precision, row.metrics.recall, row.metrics.f1,
                 row.tpr, row.fpr);
        out << buf;
    }
}

}  // namespace phishgraph
