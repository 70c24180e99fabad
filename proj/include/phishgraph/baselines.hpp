#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace phishgraph {

// Row-major dense feature matrix.
struct FeatureMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    const double* row(size_t r) const { return data.data() + r * cols; }
    void push_row(const std::vector<double>& v);
};

enum class ModelKind { logistic_regression, naive_bayes, random_forest };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

struct BaselineParams {
    ModelKind kind = ModelKind::random_forest;
    uint64_t seed = 1;
    // random forest
    int rf_trees = 100;
    int rf_max_depth = 12;
    // logistic regression
    int lr_epochs = 500;
    double lr_rate = 0.1;
    double lr_l2 = 1e-4;
    // naive bayes
    double nb_variance_floor = 1e-9;
};

struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;    // goes left when value <= threshold
    int left = -1, right = -1;
    int vote = 0;              // leaf: majority class
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int predict(const double* row) const;
};

struct TrainedModel {
    ModelKind kind = ModelKind::random_forest;
    uint64_t manifest_hash = 0;
    size_t n_features = 0;
    // z-scoring (LR and NB consume standardized features; RF raw)
    std::vector<double> feature_means;
    std::vector<double> feature_stds;
    // logistic regression
    std::vector<double> lr_weights;
    double lr_bias = 0.0;
    // naive bayes
    std::array<double, 2> nb_log_class_prior{0.0, 0.0};
    std::vector<double> nb_means[2];
    std::vector<double> nb_vars[2];
    // random forest
    std::vector<DecisionTree> forest;
};

// map url -> [p_benign, p_phish]; pairs sum to 1
using PriorTable = std::map<std::string, std::array<double, 2>>;

uint64_t manifest_hash(const std::vector<std::string>& feature_names);

// Trains one of the three baseline kinds. Deterministic under
// params.seed. Throws DataError when the training set has a single class
// or fewer than 2 samples per class.
TrainedModel train(const BaselineParams& params, const FeatureMatrix& features,
                   const std::vector<int>& labels,
                   const std::vector<std::string>& feature_names);

// [p_benign, p_phish]; throws ContractError on manifest mismatch.
std::array<double, 2> predict_proba(const TrainedModel& model, const std::vector<double>& features,
                                    uint64_t manifest);

PriorTable export_priors(const TrainedModel& model, const std::vector<std::string>& test_urls,
                         const FeatureMatrix& test_features, uint64_t manifest);

// CSV `url,p_benign,p_phish`
void save_priors(const PriorTable& priors, const std::string& path);
PriorTable load_priors(const std::string& path);

// versioned JSON blob carrying the manifest hash
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace phishgraph
