#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phishgraph/baselines.hpp"
#include "phishgraph/embeddings.hpp"
#include "phishgraph/lbp.hpp"

namespace phishgraph {

// Flat key=value run configuration. Unknown keys are rejected so typos
// cannot silently fall back to defaults.
struct RunConfig {
    // paths
    std::string dataset_path;
    std::string enrichment_path;
    std::string public_suffix_path;
    std::string output_dir = "out";

    // run shape
    uint64_t seed = 1;
    int n_folds = 5;
    int parallel_folds = 1;
    bool write_graphs = false;

    // vocabulary / features
    bool vocab_elbow_normalize = true;
    bool include_domain_contains_address = false;

    // priors: rf | lr | nb | uniform
    std::string priors_mode = "rf";
    BaselineParams baseline;

    // embeddings + similarity
    EmbeddingParams embed;
    SimilaritySpec sim;

    // edge potentials + inference
    EdgePotentialSpec edge;
    InferenceConfig lbp;

    // evaluation
    bool eval_phishing_positive = false;
    double sweep_start = 0.0;
    double sweep_stop = 1.0;
    double sweep_step = 0.1;

    static RunConfig load(const std::string& path);
    // `--set key=value` override; throws DataError on unknown keys
    void apply(const std::string& key, const std::string& value);
    // every key with its current value, sorted (the effective-config echo)
    std::map<std::string, std::string> to_map() const;
};

std::vector<double> sweep_grid(const RunConfig& config);

}  // namespace phishgraph
