#include <doctest.h>

#include <cmath>

#include "phishgraph/common.hpp"
#include "phishgraph/eval.hpp"
#include "phishgraph/rng.hpp"

using namespace phishgraph;

TEST_SUITE("eval") {

TEST_CASE("confusion: perfect classifier (benign-positive convention)") {
    std::map<std::string, int> truth = {{"b1", 0}, {"b2", 0}, {"b3", 0}, {"p1", 1}, {"p2", 1}};
    auto c = confusion(truth, truth);
    CHECK(c.tp == 3);
    CHECK(c.tn == 2);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
}

TEST_CASE("confusion: fully inverted predictions") {
    std::map<std::string, int> truth = {{"b1", 0}, {"b2", 0}, {"b3", 0}, {"p1", 1}, {"p2", 1}};
    std::map<std::string, int> flipped;
    for (const auto& [k, v] : truth) flipped[k] = 1 - v;
    auto c = confusion(flipped, truth);
    CHECK(c.tp == 0);
    CHECK(c.tn == 0);
    CHECK(c.fp == 2);  // phishing predicted benign
    CHECK(c.fn == 3);  // benign predicted phishing
}

TEST_CASE("confusion: hand-filled 2x2") {
    std::map<std::string, int> truth = {{"b", 0}, {"p", 1}};
    std::map<std::string, int> pred = {{"b", 0}, {"p", 0}};
    auto c = confusion(pred, truth);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.tn == 0);
    CHECK(c.fn == 0);
}

TEST_CASE("confusion: key mismatch lists missing URLs") {
    std::map<std::string, int> truth = {{"a", 0}, {"b", 1}};
    std::map<std::string, int> pred = {{"a", 0}};
    CHECK_THROWS_AS(confusion(pred, truth), DataError);
}

TEST_CASE("confusion: phishing-positive flip") {
    std::map<std::string, int> truth = {{"b", 0}, {"p", 1}};
    std::map<std::string, int> pred = {{"b", 0}, {"p", 1}};
    auto c = confusion(pred, truth, true);
    CHECK(c.tp == 1);  // phishing predicted phishing
    CHECK(c.tn == 1);
}

TEST_CASE("metrics fixtures") {
    SUBCASE("perfect") {
        auto m = metrics(ConfusionCounts{3, 0, 2, 0});
        CHECK(m.accuracy == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
        CHECK_FALSE(m.degenerate);
    }
    SUBCASE("tp=1 fp=1") {
        auto m = metrics(ConfusionCounts{1, 1, 0, 0});
        CHECK(m.precision == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(m.recall == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    }
    SUBCASE("degenerate zero denominators") {
        auto m = metrics(ConfusionCounts{0, 0, 2, 3});
        CHECK(m.precision == 0.0);
        CHECK(m.degenerate);
    }
    SUBCASE("empty counts rejected") {
        CHECK_THROWS_AS(metrics(ConfusionCounts{}), DataError);
    }
}

TEST_CASE("metrics oracle: 20 random confusion tables to 1e-12") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        ConfusionCounts c;
        c.tp = rng.next_below(50);
        c.fp = rng.next_below(50);
        c.tn = rng.next_below(50);
        c.fn = rng.next_below(50);
        if (c.total() == 0) c.tp = 1;
        auto m = metrics(c);
        // direct formula evaluation
        double total = static_cast<double>(c.total());
        double accuracy = (static_cast<double>(c.tp) + static_cast<double>(c.tn)) / total;
        double precision =
            (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
        double recall =
            (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
        double f1 = (precision + recall > 0) ? 2.0 * precision * recall / (precision + recall)
                                             : 0.0;
        CHECK(std::abs(m.accuracy - accuracy) < 1e-12);
        CHECK(std::abs(m.precision - precision) < 1e-12);
        CHECK(std::abs(m.recall - recall) < 1e-12);
        CHECK(std::abs(m.f1 - f1) < 1e-12);
    }
}

TEST_CASE("threshold sweep: default grid yields 11 rows") {
    std::map<std::string, double> scores = {{"a", 0.1}, {"b", 0.6}, {"c", 0.9}};
    std::map<std::string, int> truth = {{"a", 0}, {"b", 1}, {"c", 1}};
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
    auto report = threshold_sweep(scores, truth, grid);
    CHECK(report.rows.size() == 11);
}

TEST_CASE("threshold 0 labels everything phishing") {
    std::map<std::string, double> scores = {{"a", 0.0}, {"b", 0.4}, {"c", 1.0}};
    std::map<std::string, int> truth = {{"a", 0}, {"b", 0}, {"c", 1}};
    auto report = threshold_sweep(scores, truth, {0.0});
    const auto& c = report.rows[0].counts;
    // nothing predicted benign
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
    CHECK(c.fn == 2);
    CHECK(c.tn == 1);
}

TEST_CASE("argmax-F1 matches an independent re-scan") {
    SplitMix64 rng(123);
    std::map<std::string, double> scores;
    std::map<std::string, int> truth;
    for (int i = 0; i < 60; ++i) {
        std::string key = "u" + std::to_string(i);
        int label = static_cast<int>(rng.next_below(2));
        truth[key] = label;
        double base = label == 1 ? 0.65 : 0.35;
        scores[key] = std::min(1.0, std::max(0.0, base + (rng.next_double() - 0.5) * 0.6));
    }
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
    auto report = threshold_sweep(scores, truth, grid);
    double best = -1.0;
    double best_t = 0.0;
    for (const auto& row : report.rows) {
        if (row.metrics.f1 > best) {
            best = row.metrics.f1;
            best_t = row.threshold;
        }
    }
    CHECK(report.best_f1 == best);
    CHECK(report.best_f1_threshold == best_t);
}

TEST_CASE("sweep rows are monotone in the threshold") {
    // with benign-positive counting, raising the threshold can only grow
    // the predicted-benign set, so tpr and fpr are nondecreasing in t
    SplitMix64 rng(321);
    std::map<std::string, double> scores;
    std::map<std::string, int> truth;
    for (int i = 0; i < 80; ++i) {
        std::string key = "u" + std::to_string(i);
        truth[key] = static_cast<int>(rng.next_below(2));
        scores[key] = rng.next_double();
    }
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
    auto report = threshold_sweep(scores, truth, grid);
    for (size_t i = 1; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].tpr >= report.rows[i - 1].tpr);
        CHECK(report.rows[i].fpr >= report.rows[i - 1].fpr);
    }
}

TEST_CASE("sweep input validation") {
    std::map<std::string, double> scores = {{"a", 0.5}};
    std::map<std::string, int> truth = {{"a", 1}};
    CHECK_THROWS_AS(threshold_sweep(scores, truth, {}), DataError);
    CHECK_THROWS_AS(threshold_sweep(scores, truth, {0.5, 0.5}), DataError);
    CHECK_THROWS_AS(threshold_sweep({}, truth, {0.5}), DataError);
}

TEST_CASE("aggregate_cv") {
    MetricSet a;
    a.accuracy = a.precision = a.recall = a.f1 = 0.9;
    MetricSet b;
    b.accuracy = b.precision = b.recall = b.f1 = 0.8;
    ConfusionCounts ca{9, 1, 8, 2};
    ConfusionCounts cb{8, 2, 7, 3};

    SUBCASE("identical folds aggregate to themselves") {
        auto agg = aggregate_cv({a, a}, {ca, ca});
        CHECK(agg.mean_of_folds.f1 == doctest::Approx(0.9));
    }
    SUBCASE("mean of two folds") {
        auto agg = aggregate_cv({a, b}, {ca, cb});
        CHECK(agg.mean_of_folds.f1 == doctest::Approx(0.85));
        CHECK(agg.per_fold.size() == 2);
        // aggregate mean lies within [min, max] of the folds
        CHECK(agg.mean_of_folds.f1 >= 0.8);
        CHECK(agg.mean_of_folds.f1 <= 0.9);
        // pooled counts are the sums
        CHECK(agg.pooled_counts.tp == 17);
        CHECK(agg.pooled_counts.fn == 5);
    }
    SUBCASE("five folds keep five per-fold rows") {
        auto agg = aggregate_cv({a, b, a, b, a}, {ca, cb, ca, cb, ca});
        CHECK(agg.per_fold.size() == 5);
    }
}

}  // TEST_SUITE
