#pragma once

#include <map>
#include <string>
#include <vector>

#include "phishgraph/config.hpp"
#include "phishgraph/dataset.hpp"
#include "phishgraph/eval.hpp"
#include "phishgraph/lbp.hpp"

namespace phishgraph {

struct FoldOutcome {
    int fold = 0;
    ConfusionCounts graph_counts;
    MetricSet graph_metrics;
    std::map<std::string, ConfusionCounts> baseline_counts;  // keyed by model kind name
    std::map<std::string, MetricSet> baseline_metrics;
    std::map<std::string, double> scores;  // test url -> graph phish_score
    std::map<std::string, int> truth;      // test url -> ground-truth label
    // inference summary (node rows are written to the fold CSV, not kept)
    double cvg = 1.0;
    int rounds = 0;
    size_t sweeps_total = 0;
    size_t edges_deleted = 0;
    size_t edges_restored = 0;
    size_t epsilon_fallback_edges = 0;
    size_t invariant_violations = 0;
    bool forced_readd = false;
    size_t graph_nodes = 0;
    size_t graph_edges = 0;
    size_t skipped_urls = 0;
    size_t excluded_test_urls = 0;
    size_t vocab_kept = 0;
    uint64_t vocab_cutoff = 0;
};

struct RunOutcome {
    DatasetSummary dataset_summary;
    std::vector<FoldOutcome> folds;
    CvAggregate graph_agg;
    std::map<std::string, CvAggregate> baseline_aggs;
    SweepReport sweep;  // over the pooled cross-fold scores
    std::map<std::string, double> pooled_scores;
    std::map<std::string, int> pooled_truth;
};

// output_dir env override (PHISHGRAPH_OUTPUT_DIR), then the config value
std::string resolve_output_dir(const RunConfig& config);

// Full cross-validation pipeline: folds -> per-fold {vocabulary, baselines,
// priors, embeddings, graph, inference} -> evaluation. Deterministic under
// the config seed; parallel_folds > 1 runs folds concurrently with
// identical results. When output_dir is nonempty, per-fold artifacts
// (vocabulary/priors/embeddings/inference CSVs, optionally graphs) are
// written as the folds complete.
RunOutcome run_pipeline(const RunConfig& config, const std::string& output_dir = "");

// report.json, sweep.csv and the effective-config echo
void write_reports(const RunOutcome& outcome, const RunConfig& config,
                   const std::string& output_dir);

// builds the graph for one fold and writes it as JSONL
void export_graph(const RunConfig& config, int fold, const std::string& path);

}  // namespace phishgraph
