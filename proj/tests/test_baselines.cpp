#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "phishgraph/baselines.hpp"
#include "phishgraph/common.hpp"
#include "phishgraph/rng.hpp"

using namespace phishgraph;

namespace {

std::vector<std::string> names_for(size_t d) {
    std::vector<std::string> names;
    for (size_t i = 0; i < d; ++i) names.push_back("f" + std::to_string(i));
    return names;
}

// fixed-seed XOR-like set: class 1 in opposite quadrants, plus a noise dim
void make_xor_set(FeatureMatrix& x, std::vector<int>& y, size_t n, uint64_t seed) {
    SplitMix64 rng(seed);
    for (size_t i = 0; i < n; ++i) {
        double a = rng.next_double() * 2.0 - 1.0;
        double b = rng.next_double() * 2.0 - 1.0;
        double noise = rng.next_double();
        x.push_row({a, b, noise});
        y.push_back((a > 0) != (b > 0) ? 1 : 0);
    }
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("logistic regression separates a linearly separable toy set") {
    FeatureMatrix x;
    std::vector<int> y;
    for (int i = 0; i < 10; ++i) {
        x.push_row({static_cast<double>(i), 1.0});
        y.push_back(i < 5 ? 0 : 1);
    }
    BaselineParams params;
    params.kind = ModelKind::logistic_regression;
    auto model = train(params, x, y, names_for(2));
    auto manifest = manifest_hash(names_for(2));
    for (int i = 0; i < 10; ++i) {
        auto p = predict_proba(model, {static_cast<double>(i), 1.0}, manifest);
        CHECK((p[1] >= 0.5 ? 1 : 0) == y[static_cast<size_t>(i)]);
    }
}

TEST_CASE("naive bayes survives a constant feature column") {
    FeatureMatrix x;
    std::vector<int> y;
    for (int i = 0; i < 8; ++i) {
        x.push_row({static_cast<double>(i % 4), 3.0});  // second column constant
        y.push_back(i % 2);
    }
    BaselineParams params;
    params.kind = ModelKind::naive_bayes;
    auto model = train(params, x, y, names_for(2));
    auto p = predict_proba(model, {1.0, 3.0}, manifest_hash(names_for(2)));
    CHECK(std::isfinite(p[0]));
    CHECK(std::isfinite(p[1]));
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("random forest fits XOR-like data") {
    FeatureMatrix x;
    std::vector<int> y;
    make_xor_set(x, y, 200, 17);
    BaselineParams params;
    params.kind = ModelKind::random_forest;
    params.seed = 5;
    auto model = train(params, x, y, names_for(3));
    auto manifest = manifest_hash(names_for(3));
    size_t correct = 0;
    for (size_t i = 0; i < x.rows; ++i) {
        std::vector<double> row(x.row(i), x.row(i) + x.cols);
        auto p = predict_proba(model, row, manifest);
        correct += ((p[1] >= 0.5 ? 1 : 0) == y[i]) ? 1 : 0;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(x.rows) > 0.95);
}

TEST_CASE("single-class training set is rejected") {
    FeatureMatrix x;
    std::vector<int> y;
    for (int i = 0; i < 6; ++i) {
        x.push_row({static_cast<double>(i)});
        y.push_back(0);
    }
    BaselineParams params;
    CHECK_THROWS_AS(train(params, x, y, names_for(1)), DataError);
}

TEST_CASE("rf probability is the vote fraction") {
    // forests assembled by hand: every tree is a single leaf
    TrainedModel model;
    model.kind = ModelKind::random_forest;
    model.n_features = 1;
    model.manifest_hash = manifest_hash(names_for(1));

    SUBCASE("unanimous benign") {
        for (int i = 0; i < 100; ++i) {
            DecisionTree t;
            t.nodes.push_back(TreeNode{-1, 0.0, -1, -1, 0});
            model.forest.push_back(t);
        }
        auto p = predict_proba(model, {0.0}, model.manifest_hash);
        CHECK(p[0] == 1.0);
        CHECK(p[1] == 0.0);
    }
    SUBCASE("60 of 100 vote phishing") {
        for (int i = 0; i < 100; ++i) {
            DecisionTree t;
            t.nodes.push_back(TreeNode{-1, 0.0, -1, -1, i < 60 ? 1 : 0});
            model.forest.push_back(t);
        }
        auto p = predict_proba(model, {0.0}, model.manifest_hash);
        CHECK(p[0] == doctest::Approx(0.4));
        CHECK(p[1] == doctest::Approx(0.6));
    }
}

TEST_CASE("lr with zero weights scores 0.5") {
    TrainedModel model;
    model.kind = ModelKind::logistic_regression;
    model.n_features = 2;
    model.manifest_hash = manifest_hash(names_for(2));
    model.feature_means = {0.0, 0.0};
    model.feature_stds = {1.0, 1.0};
    model.lr_weights = {0.0, 0.0};
    model.lr_bias = 0.0;
    auto p = predict_proba(model, {3.0, -4.0}, model.manifest_hash);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("manifest mismatch is rejected") {
    FeatureMatrix x;
    std::vector<int> y;
    for (int i = 0; i < 8; ++i) {
        x.push_row({static_cast<double>(i)});
        y.push_back(i % 2);
    }
    BaselineParams params;
    auto model = train(params, x, y, names_for(1));
    CHECK_THROWS_AS(predict_proba(model, {1.0}, manifest_hash({"other"})), ContractError);
}

TEST_CASE("rf determinism: same seed, identical forests") {
    FeatureMatrix x;
    std::vector<int> y;
    make_xor_set(x, y, 120, 23);
    BaselineParams params;
    params.seed = 9;
    auto m1 = train(params, x, y, names_for(3));
    auto m2 = train(params, x, y, names_for(3));
    REQUIRE(m1.forest.size() == m2.forest.size());
    for (size_t t = 0; t < m1.forest.size(); ++t) {
        REQUIRE(m1.forest[t].nodes.size() == m2.forest[t].nodes.size());
        for (size_t k = 0; k < m1.forest[t].nodes.size(); ++k) {
            CHECK(m1.forest[t].nodes[k].feature == m2.forest[t].nodes[k].feature);
            CHECK(m1.forest[t].nodes[k].threshold == m2.forest[t].nodes[k].threshold);
            CHECK(m1.forest[t].nodes[k].vote == m2.forest[t].nodes[k].vote);
        }
    }
}

TEST_CASE("probability simplex holds for all kinds") {
    FeatureMatrix x;
    std::vector<int> y;
    make_xor_set(x, y, 100, 31);
    auto manifest = manifest_hash(names_for(3));
    for (ModelKind kind : {ModelKind::logistic_regression, ModelKind::naive_bayes,
                           ModelKind::random_forest}) {
        BaselineParams params;
        params.kind = kind;
        auto model = train(params, x, y, names_for(3));
        SplitMix64 rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> row = {rng.next_double(), rng.next_double(), rng.next_double()};
            auto p = predict_proba(model, row, manifest);
            CHECK(p[0] >= 0.0);
            CHECK(p[1] >= 0.0);
            CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("nb and lr agree with brute-force formula evaluation") {
    FeatureMatrix x;
    std::vector<int> y;
    SplitMix64 rng(41);
    for (int i = 0; i < 40; ++i) {
        std::vector<double> row = {rng.next_double() * 3, rng.next_double() * 3,
                                   rng.next_double() * 3};
        y.push_back(row[0] + row[1] > 3.0 ? 1 : 0);
        x.push_row(row);
    }
    auto manifest = manifest_hash(names_for(3));

    SUBCASE("logistic regression score") {
        BaselineParams params;
        params.kind = ModelKind::logistic_regression;
        auto model = train(params, x, y, names_for(3));
        std::vector<double> probe = {1.0, 2.0, 0.5};
        // independent evaluation of sigma(w . z + b)
        double score = model.lr_bias;
        for (size_t c = 0; c < 3; ++c) {
            double z = (probe[c] - model.feature_means[c]) / model.feature_stds[c];
            score += model.lr_weights[c] * z;
        }
        double expect = 1.0 / (1.0 + std::exp(-score));
        auto p = predict_proba(model, probe, manifest);
        CHECK(p[1] == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("naive bayes log posterior") {
        BaselineParams params;
        params.kind = ModelKind::naive_bayes;
        auto model = train(params, x, y, names_for(3));
        std::vector<double> probe = {1.0, 2.0, 0.5};
        double lp[2];
        for (int c = 0; c < 2; ++c) {
            lp[c] = model.nb_log_class_prior[static_cast<size_t>(c)];
            for (size_t j = 0; j < 3; ++j) {
                double z = (probe[j] - model.feature_means[j]) / model.feature_stds[j];
                double var = model.nb_vars[c][j];
                double diff = z - model.nb_means[c][j];
                lp[c] += -0.5 * std::log(2.0 * M_PI * var) - diff * diff / (2.0 * var);
            }
        }
        double m = std::max(lp[0], lp[1]);
        double expect = std::exp(lp[1] - m) / (std::exp(lp[0] - m) + std::exp(lp[1] - m));
        auto p = predict_proba(model, probe, manifest);
        CHECK(p[1] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("export_priors") {
    FeatureMatrix x;
    std::vector<int> y;
    make_xor_set(x, y, 60, 3);
    BaselineParams params;
    auto model = train(params, x, y, names_for(3));
    auto manifest = manifest_hash(names_for(3));

    SUBCASE("empty test set, empty table") {
        FeatureMatrix none;
        none.cols = 3;
        auto table = export_priors(model, {}, none, manifest);
        CHECK(table.empty());
    }
    SUBCASE("rows sum to one") {
        FeatureMatrix test;
        test.push_row({0.5, -0.5, 0.1});
        test.push_row({-0.7, 0.3, 0.9});
        auto table = export_priors(model, {"http://a.com", "http://b.com"}, test, manifest);
        REQUIRE(table.size() == 2);
        for (const auto& [url, p] : table) {
            CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("priors CSV round-trips within 1e-12") {
    PriorTable priors;
    priors["http://a.com/x,y"] = {0.123456789012345, 0.876543210987655};
    priors["http://b.com"] = {1.0 / 3.0, 2.0 / 3.0};
    auto path = (std::filesystem::temp_directory_path() / "pg_priors.csv").string();
    save_priors(priors, path);
    auto loaded = load_priors(path);
    REQUIRE(loaded.size() == priors.size());
    for (const auto& [url, p] : priors) {
        REQUIRE(loaded.count(url) == 1);
        CHECK(std::abs(loaded[url][0] - p[0]) < 1e-12);
        CHECK(std::abs(loaded[url][1] - p[1]) < 1e-12);
    }
}

TEST_CASE("model files round-trip through JSON") {
    FeatureMatrix x;
    std::vector<int> y;
    make_xor_set(x, y, 80, 13);
    auto manifest = manifest_hash(names_for(3));
    auto path = (std::filesystem::temp_directory_path() / "pg_model.json").string();
    for (ModelKind kind : {ModelKind::logistic_regression, ModelKind::naive_bayes,
                           ModelKind::random_forest}) {
        BaselineParams params;
        params.kind = kind;
        params.rf_trees = 10;
        auto model = train(params, x, y, names_for(3));
        save_model(model, path);
        auto loaded = load_model(path);
        std::vector<double> probe = {0.2, -0.4, 0.6};
        auto p1 = predict_proba(model, probe, manifest);
        auto p2 = predict_proba(loaded, probe, manifest);
        CHECK(p1[0] == doctest::Approx(p2[0]).epsilon(1e-15));
        CHECK(p1[1] == doctest::Approx(p2[1]).epsilon(1e-15));
    }
}

}  // TEST_SUITE
