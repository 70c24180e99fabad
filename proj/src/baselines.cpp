#include "phishgraph/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "phishgraph/common.hpp"
#include "phishgraph/csv.hpp"
#include "phishgraph/rng.hpp"

namespace phishgraph {

void FeatureMatrix::push_row(const std::vector<double>& v) {
    if (rows == 0 && cols == 0) cols = v.size();
    if (v.size() != cols) throw ContractError("feature row length mismatch");
    data.insert(data.end(), v.begin(), v.end());
    ++rows;
}

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::logistic_regression: return "logistic_regression";
        case ModelKind::naive_bayes: return "naive_bayes";
        case ModelKind::random_forest: return "random_forest";
    }
    return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "logistic_regression" || name == "lr") return ModelKind::logistic_regression;
    if (name == "naive_bayes" || name == "nb") return ModelKind::naive_bayes;
    if (name == "random_forest" || name == "rf") return ModelKind::random_forest;
    throw DataError("unknown model kind: " + name);
}

uint64_t manifest_hash(const std::vector<std::string>& feature_names) {
    std::string joined;
    for (const auto& n : feature_names) {
        joined += n;
        joined.push_back('\n');
    }
    return fnv1a64(joined);
}

int DecisionTree::predict(const double* row) const {
    int idx = 0;
    while (nodes[idx].feature >= 0) {
        idx = (row[nodes[idx].feature] <= nodes[idx].threshold) ? nodes[idx].left
                                                                : nodes[idx].right;
    }
    return nodes[idx].vote;
}

namespace {

void compute_standardization(const FeatureMatrix& x, std::vector<double>& means,
                             std::vector<double>& stds) {
    means.assign(x.cols, 0.0);
    stds.assign(x.cols, 0.0);
    for (size_t r = 0; r < x.rows; ++r) {
        for (size_t c = 0; c < x.cols; ++c) means[c] += x.at(r, c);
    }
    for (auto& m : means) m /= static_cast<double>(x.rows);
    for (size_t r = 0; r < x.rows; ++r) {
        for (size_t c = 0; c < x.cols; ++c) {
            double d = x.at(r, c) - means[c];
            stds[c] += d * d;
        }
    }
    for (auto& s : stds) {
        s = std::sqrt(s / static_cast<double>(x.rows));
        if (s == 0.0) s = 1.0;  // constant column
    }
}

std::vector<double> standardize_row(const TrainedModel& m, const double* row) {
    std::vector<double> z(m.n_features);
    for (size_t c = 0; c < m.n_features; ++c) {
        z[c] = (row[c] - m.feature_means[c]) / m.feature_stds[c];
    }
    return z;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void train_logistic(TrainedModel& model, const BaselineParams& p, const FeatureMatrix& x,
                    const std::vector<int>& y) {
    compute_standardization(x, model.feature_means, model.feature_stds);
    size_t n = x.rows, d = x.cols;
    std::vector<double> z(n * d);
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < d; ++c) {
            z[r * d + c] = (x.at(r, c) - model.feature_means[c]) / model.feature_stds[c];
        }
    }

    model.lr_weights.assign(d, 0.0);
    model.lr_bias = 0.0;
    std::vector<double> grad(d);
    for (int epoch = 0; epoch < p.lr_epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (size_t r = 0; r < n; ++r) {
            double score = model.lr_bias;
            for (size_t c = 0; c < d; ++c) score += model.lr_weights[c] * z[r * d + c];
            double err = sigmoid(score) - static_cast<double>(y[r]);
            for (size_t c = 0; c < d; ++c) grad[c] += err * z[r * d + c];
            grad_bias += err;
        }
        double inv_n = 1.0 / static_cast<double>(n);
        for (size_t c = 0; c < d; ++c) {
            grad[c] = grad[c] * inv_n + p.lr_l2 * model.lr_weights[c];
            model.lr_weights[c] -= p.lr_rate * grad[c];
        }
        model.lr_bias -= p.lr_rate * grad_bias * inv_n;
    }
}

void train_naive_bayes(TrainedModel& model, const BaselineParams& p, const FeatureMatrix& x,
                       const std::vector<int>& y) {
    compute_standardization(x, model.feature_means, model.feature_stds);
    size_t d = x.cols;
    size_t counts[2] = {0, 0};
    for (int c = 0; c < 2; ++c) {
        model.nb_means[c].assign(d, 0.0);
        model.nb_vars[c].assign(d, 0.0);
    }
    for (size_t r = 0; r < x.rows; ++r) {
        int c = y[r];
        ++counts[c];
        for (size_t j = 0; j < d; ++j) {
            model.nb_means[c][j] += (x.at(r, j) - model.feature_means[j]) / model.feature_stds[j];
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (size_t j = 0; j < d; ++j) model.nb_means[c][j] /= static_cast<double>(counts[c]);
    }
    for (size_t r = 0; r < x.rows; ++r) {
        int c = y[r];
        for (size_t j = 0; j < d; ++j) {
            double v = (x.at(r, j) - model.feature_means[j]) / model.feature_stds[j];
            double diff = v - model.nb_means[c][j];
            model.nb_vars[c][j] += diff * diff;
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (size_t j = 0; j < d; ++j) {
            model.nb_vars[c][j] =
                std::max(model.nb_vars[c][j] / static_cast<double>(counts[c]), p.nb_variance_floor);
        }
        model.nb_log_class_prior[c] =
            std::log(static_cast<double>(counts[c]) / static_cast<double>(x.rows));
    }
}

struct TreeBuilder {
    const FeatureMatrix& x;
    const std::vector<int>& y;
    int max_depth;
    size_t features_per_split;
    SplitMix64 rng;
    DecisionTree tree;

    TreeBuilder(const FeatureMatrix& x_, const std::vector<int>& y_, int max_depth_, uint64_t seed)
        : x(x_), y(y_), max_depth(max_depth_),
          features_per_split(static_cast<size_t>(
              std::ceil(std::sqrt(static_cast<double>(x_.cols))))),
          rng(seed) {}

    static double gini(size_t c0, size_t c1) {
        double total = static_cast<double>(c0 + c1);
        if (total == 0.0) return 0.0;
        double p0 = static_cast<double>(c0) / total;
        double p1 = static_cast<double>(c1) / total;
        return 1.0 - p0 * p0 - p1 * p1;
    }

    int make_leaf(const std::vector<size_t>& idx) {
        size_t c1 = 0;
        for (size_t i : idx) c1 += static_cast<size_t>(y[i]);
        TreeNode leaf;
        leaf.vote = (c1 * 2 > idx.size()) ? 1 : 0;  // ties vote benign
        tree.nodes.push_back(leaf);
        return static_cast<int>(tree.nodes.size() - 1);
    }

    int build(std::vector<size_t> idx, int depth) {
        size_t c1 = 0;
        for (size_t i : idx) c1 += static_cast<size_t>(y[i]);
        bool pure = (c1 == 0 || c1 == idx.size());
        if (pure || depth >= max_depth || idx.size() < 2) return make_leaf(idx);

        // sample features without replacement
        std::vector<size_t> candidates(x.cols);
        std::iota(candidates.begin(), candidates.end(), 0);
        deterministic_shuffle(candidates, rng);
        candidates.resize(std::min(features_per_split, candidates.size()));

        double best_impurity = gini(idx.size() - c1, c1);
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::pair<double, int>> column(idx.size());

        for (size_t f : candidates) {
            for (size_t k = 0; k < idx.size(); ++k) {
                column[k] = {x.at(idx[k], f), y[idx[k]]};
            }
            std::sort(column.begin(), column.end());
            size_t left_c0 = 0, left_c1 = 0;
            size_t total_c1 = c1, total = idx.size();
            for (size_t k = 0; k + 1 < total; ++k) {
                if (column[k].second == 1) ++left_c1;
                else ++left_c0;
                if (column[k].first == column[k + 1].first) continue;
                size_t left_n = k + 1;
                double w_left = static_cast<double>(left_n) / static_cast<double>(total);
                double impurity =
                    w_left * gini(left_c0, left_c1) +
                    (1.0 - w_left) * gini((total - total_c1) - left_c0, total_c1 - left_c1);
                if (impurity < best_impurity - 1e-12) {
                    best_impurity = impurity;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (column[k].first + column[k + 1].first);
                }
            }
        }
        if (best_feature < 0) return make_leaf(idx);

        std::vector<size_t> left, right;
        for (size_t i : idx) {
            (x.at(i, static_cast<size_t>(best_feature)) <= best_threshold ? left : right)
                .push_back(i);
        }
        if (left.empty() || right.empty()) return make_leaf(idx);

        int node_idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes[node_idx].feature = best_feature;
        tree.nodes[node_idx].threshold = best_threshold;
        int l = build(std::move(left), depth + 1);
        int r = build(std::move(right), depth + 1);
        tree.nodes[node_idx].left = l;
        tree.nodes[node_idx].right = r;
        return node_idx;
    }
};

void train_forest(TrainedModel& model, const BaselineParams& p, const FeatureMatrix& x,
                  const std::vector<int>& y) {
    model.forest.reserve(static_cast<size_t>(p.rf_trees));
    for (int t = 0; t < p.rf_trees; ++t) {
        uint64_t tree_seed = derive_seed(p.seed, "rf_tree", static_cast<uint64_t>(t));
        SplitMix64 bootstrap_rng(derive_seed(tree_seed, "bootstrap"));
        std::vector<size_t> sample(x.rows);
        for (auto& s : sample) s = static_cast<size_t>(bootstrap_rng.next_below(x.rows));
        std::sort(sample.begin(), sample.end());

        TreeBuilder builder(x, y, p.rf_max_depth, derive_seed(tree_seed, "splits"));
        builder.build(std::move(sample), 0);
        model.forest.push_back(std::move(builder.tree));
    }
}

}  // namespace

TrainedModel train(const BaselineParams& params, const FeatureMatrix& features,
                   const std::vector<int>& labels, const std::vector<std::string>& feature_names) {
    if (features.rows != labels.size()) throw ContractError("features/labels size mismatch");
    if (features.cols != feature_names.size()) throw ContractError("manifest length mismatch");
    size_t per_class[2] = {0, 0};
    for (int l : labels) ++per_class[l];
    if (per_class[0] < 2 || per_class[1] < 2) {
        throw DataError("training requires at least 2 samples per class (got " +
                        std::to_string(per_class[0]) + "/" + std::to_string(per_class[1]) + ")");
    }
    for (double v : features.data) {
        if (!std::isfinite(v)) throw DataError("non-finite feature value in training set");
    }

    TrainedModel model;
    model.kind = params.kind;
    model.n_features = features.cols;
    model.manifest_hash = manifest_hash(feature_names);
    switch (params.kind) {
        case ModelKind::logistic_regression:
            train_logistic(model, params, features, labels);
            break;
        case ModelKind::naive_bayes:
            train_naive_bayes(model, params, features, labels);
            break;
        case ModelKind::random_forest:
            train_forest(model, params, features, labels);
            break;
    }
    return model;
}

std::array<double, 2> predict_proba(const TrainedModel& model, const std::vector<double>& features,
                                    uint64_t manifest) {
    if (manifest != model.manifest_hash) throw ContractError("feature manifest hash mismatch");
    if (features.size() != model.n_features) throw ContractError("feature length mismatch");

    switch (model.kind) {
        case ModelKind::logistic_regression: {
            auto z = standardize_row(model, features.data());
            double score = model.lr_bias;
            for (size_t c = 0; c < z.size(); ++c) score += model.lr_weights[c] * z[c];
            double p = sigmoid(score);
            return {1.0 - p, p};
        }
        case ModelKind::naive_bayes: {
            auto z = standardize_row(model, features.data());
            double log_post[2];
            for (int c = 0; c < 2; ++c) {
                double lp = model.nb_log_class_prior[c];
                for (size_t j = 0; j < z.size(); ++j) {
                    double var = model.nb_vars[c][j];
                    double diff = z[j] - model.nb_means[c][j];
                    lp += -0.5 * std::log(2.0 * M_PI * var) - diff * diff / (2.0 * var);
                }
                log_post[c] = lp;
            }
            double m = std::max(log_post[0], log_post[1]);
            double e0 = std::exp(log_post[0] - m), e1 = std::exp(log_post[1] - m);
            return {e0 / (e0 + e1), e1 / (e0 + e1)};
        }
        case ModelKind::random_forest: {
            size_t votes = 0;
            for (const auto& tree : model.forest) {
                votes += static_cast<size_t>(tree.predict(features.data()));
            }
            double p = static_cast<double>(votes) / static_cast<double>(model.forest.size());
            return {1.0 - p, p};
        }
    }
    throw ContractError("unreachable model kind");
}

PriorTable export_priors(const TrainedModel& model, const std::vector<std::string>& test_urls,
                         const FeatureMatrix& test_features, uint64_t manifest) {
    if (test_urls.size() != test_features.rows) throw ContractError("urls/features size mismatch");
    PriorTable table;
    for (size_t r = 0; r < test_urls.size(); ++r) {
        std::vector<double> row(test_features.row(r), test_features.row(r) + test_features.cols);
        table[test_urls[r]] = predict_proba(model, row, manifest);
    }
    return table;
}

void save_priors(const PriorTable& priors, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write priors file: " + path);
    out << "url,p_benign,p_phish\n";
    char buf[64];
    for (const auto& [url, p] : priors) {
        out << csv::quote_field(url);
        snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", p[0], p[1]);
        out << buf;
    }
}

PriorTable load_priors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open priors file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "url,p_benign,p_phish") {
        throw DataError("bad priors header in " + path);
    }
    PriorTable table;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        if (fields.size() != 3) throw DataError("bad priors row at line " + std::to_string(line_no));
        try {
            table[fields[0]] = {std::stod(fields[1]), std::stod(fields[2])};
        } catch (const std::exception&) {
            throw DataError("bad probability at line " + std::to_string(line_no));
        }
    }
    return table;
}

// ============================================================================
// Model serialization
// ============================================================================

void save_model(const TrainedModel& model, const std::string& path) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["kind"] = model_kind_name(model.kind);
    j["manifest_hash"] = model.manifest_hash;
    j["n_features"] = model.n_features;
    j["feature_means"] = model.feature_means;
    j["feature_stds"] = model.feature_stds;
    switch (model.kind) {
        case ModelKind::logistic_regression:
            j["weights"] = model.lr_weights;
            j["bias"] = model.lr_bias;
            break;
        case ModelKind::naive_bayes:
            j["log_class_prior"] = model.nb_log_class_prior;
            j["means0"] = model.nb_means[0];
            j["means1"] = model.nb_means[1];
            j["vars0"] = model.nb_vars[0];
            j["vars1"] = model.nb_vars[1];
            break;
        case ModelKind::random_forest: {
            nlohmann::ordered_json trees = nlohmann::json::array();
            for (const auto& tree : model.forest) {
                nlohmann::ordered_json nodes = nlohmann::json::array();
                for (const auto& n : tree.nodes) {
                    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.vote});
                }
                trees.push_back(std::move(nodes));
            }
            j["forest"] = std::move(trees);
            break;
        }
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    out << j.dump() << "\n";
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("malformed model file " + path + ": " + e.what());
    }
    TrainedModel model;
    try {
        if (!j.contains("version") || j["version"].get<int>() != 1) {
            throw DataError("unsupported model file version in " + path);
        }
        model.kind = model_kind_from_name(j["kind"].get<std::string>());
        model.manifest_hash = j["manifest_hash"].get<uint64_t>();
        model.n_features = j["n_features"].get<size_t>();
        model.feature_means = j["feature_means"].get<std::vector<double>>();
        model.feature_stds = j["feature_stds"].get<std::vector<double>>();
        switch (model.kind) {
            case ModelKind::logistic_regression:
                model.lr_weights = j["weights"].get<std::vector<double>>();
                model.lr_bias = j["bias"].get<double>();
                break;
            case ModelKind::naive_bayes:
                model.nb_log_class_prior = j["log_class_prior"].get<std::array<double, 2>>();
                model.nb_means[0] = j["means0"].get<std::vector<double>>();
                model.nb_means[1] = j["means1"].get<std::vector<double>>();
                model.nb_vars[0] = j["vars0"].get<std::vector<double>>();
                model.nb_vars[1] = j["vars1"].get<std::vector<double>>();
                break;
            case ModelKind::random_forest:
                for (const auto& tree_json : j["forest"]) {
                    DecisionTree tree;
                    for (const auto& n : tree_json) {
                        TreeNode node;
                        node.feature = n[0].get<int>();
                        node.threshold = n[1].get<double>();
                        node.left = n[2].get<int>();
                        node.right = n[3].get<int>();
                        node.vote = n[4].get<int>();
                        tree.nodes.push_back(node);
                    }
                    model.forest.push_back(std::move(tree));
                }
                break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model file " + path + ": " + e.what());
    }
    return model;
}

}  // namespace phishgraph
