#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "wosr/iforest.hpp"

using namespace wosr;

namespace {

std::vector<std::vector<double>> gaussian_cluster(size_t n, double sigma, uint64_t seed,
                                                  double cx = 0.0, double cy = 0.0) {
    Rng rng(seed);
    std::vector<std::vector<double>> pts(n);
    for (auto& p : pts) p = {cx + sigma * rng.gauss(), cy + sigma * rng.gauss()};
    return pts;
}

int tree_depth(const ITree& t, int32_t node = 0) {
    const auto& nd = t.nodes[size_t(node)];
    if (nd.split_dim < 0) return 0;
    return 1 + std::max(tree_depth(t, nd.left), tree_depth(t, nd.right));
}

}  // namespace

TEST_CASE("c_factor matches the closed form") {
    // [TRIVIAL] defined base cases; [DERIVED] formula evaluation.
    CHECK(c_factor(0) == 0.0);
    CHECK(c_factor(1) == 0.0);
    CHECK(c_factor(2) == doctest::Approx(2.0 * 0.5772156649 - 1.0).epsilon(1e-9));
    CHECK(c_factor(2) == doctest::Approx(0.15443).epsilon(1e-4));
    CHECK(c_factor(256) == doctest::Approx(10.2448).epsilon(1e-4));
}

TEST_CASE("training flag rate honors the contamination setting") {
    // [PAPER] contamination 0.02 -> 0.02 +- 0.01 of training points flagged.
    auto pts = gaussian_cluster(5000, 1.0, 3);
    auto model = iforest_fit(pts, 100, 256, 0.02, 7, WaveformClass::SC);
    CHECK(model.fitted);
    CHECK(model.train_flag_rate == doctest::Approx(0.02).epsilon(0.5));
    size_t flagged = 0;
    for (const auto& p : pts)
        if (is_outlier(model, p).first) ++flagged;
    const double rate = double(flagged) / double(pts.size());
    CHECK(rate > 0.01);
    CHECK(rate < 0.03);
    CHECK(rate == doctest::Approx(model.train_flag_rate));
}

TEST_CASE("fitting is seed-deterministic") {
    // [TRIVIAL] same seed twice -> identical forests.
    auto pts = gaussian_cluster(600, 1.0, 4);
    auto a = iforest_fit(pts, 50, 128, 0.02, 11, WaveformClass::OFDM);
    auto b = iforest_fit(pts, 50, 128, 0.02, 11, WaveformClass::OFDM);
    REQUIRE(a.trees.size() == b.trees.size());
    for (size_t t = 0; t < a.trees.size(); ++t) {
        REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
        for (size_t i = 0; i < a.trees[t].nodes.size(); ++i) {
            const auto &na = a.trees[t].nodes[i], &nb = b.trees[t].nodes[i];
            CHECK(na.split_dim == nb.split_dim);
            CHECK(na.split_value == nb.split_value);
            CHECK(na.left == nb.left);
            CHECK(na.right == nb.right);
            CHECK(na.size == nb.size);
        }
    }
    CHECK(a.score_threshold == b.score_threshold);
    auto c = iforest_fit(pts, 50, 128, 0.02, 12, WaveformClass::OFDM);
    CHECK(c.score_threshold != a.score_threshold);  // different seed, different forest
}

TEST_CASE("identical points degenerate to score 0.5 and stay inliers") {
    // [TRIVIAL] forced degenerate: single external node per tree, E[h] = c(psi),
    // so the score is exactly 0.5 and the boundary rule (score == threshold) holds.
    std::vector<std::vector<double>> pts(300, {1.0, -2.0, 3.0});
    auto model = iforest_fit(pts, 50, 64, 0.02, 5, WaveformClass::AM);
    for (const auto& tree : model.trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].split_dim == -1);
    }
    const double s = anomaly_score(model, pts[0]);
    CHECK(s == 0.5);
    CHECK(model.score_threshold == 0.5);
    auto [flag, score] = is_outlier(model, pts[0]);
    CHECK(score == 0.5);
    CHECK(!flag);  // boundary counts as inlier
    CHECK(model.train_flag_rate == 0.0);
}

TEST_CASE("a far outlier outscores every inlier") {
    // [DERIVED] tight cluster + one point 10 sigma away, psi=64, 100 trees.
    const double sigma = 0.02;
    auto pts = gaussian_cluster(500, sigma, 6);
    auto model = iforest_fit(pts, 100, 64, 0.02, 9, WaveformClass::FM);
    const std::vector<double> outlier{1.0, 1.0};  // 50 sigma out; >> 10 sigma
    const double s_out = anomaly_score(model, outlier);
    CHECK(s_out > 0.6);
    double max_in = 0.0;
    for (const auto& p : pts) max_in = std::max(max_in, anomaly_score(model, p));
    CHECK(s_out > max_in);
    // [DERIVED] flags follow the score rule.
    CHECK(is_outlier(model, outlier).first);
    // Scores live in (0, 1).
    CHECK(s_out < 1.0);
    CHECK(max_in > 0.0);
}

TEST_CASE("a duplicated training inlier is accepted across refits") {
    // [DERIVED] Monte-Carlo refit check, acceptance probability >= 0.95.
    auto pts = gaussian_cluster(400, 1.0, 7);
    // Use the point closest to the cluster center as the canonical inlier.
    size_t best = 0;
    double best_d = 1e300;
    for (size_t i = 0; i < pts.size(); ++i) {
        const double d = pts[i][0] * pts[i][0] + pts[i][1] * pts[i][1];
        if (d < best_d) best_d = d, best = i;
    }
    int accepted = 0;
    const int refits = 40;
    for (int r = 0; r < refits; ++r) {
        auto model = iforest_fit(pts, 100, 128, 0.02, 100 + uint64_t(r), WaveformClass::LFM);
        if (!is_outlier(model, pts[best]).first) ++accepted;
    }
    CHECK(double(accepted) / refits >= 0.95);
}

TEST_CASE("tree depth is capped at ceil(log2(psi))") {
    auto pts = gaussian_cluster(2000, 1.0, 8);
    auto model = iforest_fit(pts, 60, 256, 0.02, 13, WaveformClass::SCFDMA);
    CHECK(model.max_depth() == 8);
    for (const auto& tree : model.trees) CHECK(tree_depth(tree) <= 8);
}

TEST_CASE("isolation scores separate cluster from ring with AUROC >= 0.99") {
    // [DERIVED] synthetic separability oracle.
    auto inliers = gaussian_cluster(400, 0.05, 9);
    Rng rng(10);
    std::vector<std::vector<double>> outliers;
    for (int i = 0; i < 100; ++i) {
        const double ang = rng.uniform(0.0, 6.283185307);
        outliers.push_back({2.0 * std::cos(ang), 2.0 * std::sin(ang)});
    }
    auto model = iforest_fit(inliers, 100, 64, 0.02, 14, WaveformClass::PhaseCoded);
    // Rank-sum AUROC.
    size_t wins = 0, ties = 0;
    for (const auto& o : outliers) {
        const double so = anomaly_score(model, o);
        for (const auto& i : inliers) {
            const double si = anomaly_score(model, i);
            if (so > si) ++wins;
            else if (so == si) ++ties;
        }
    }
    const double auroc =
        (double(wins) + 0.5 * double(ties)) / (double(outliers.size()) * double(inliers.size()));
    CHECK(auroc >= 0.99);
}

TEST_CASE("fit validates its inputs") {
    auto pts = gaussian_cluster(50, 1.0, 11);
    CHECK_THROWS_AS(iforest_fit({}, 10, 16, 0.02, 1, WaveformClass::SC), InvalidInput);
    CHECK_THROWS_AS(iforest_fit(pts, 0, 16, 0.02, 1, WaveformClass::SC), InvalidParams);
    CHECK_THROWS_AS(iforest_fit(pts, 10, 0, 0.02, 1, WaveformClass::SC), InvalidParams);
    CHECK_THROWS_AS(iforest_fit(pts, 10, 16, 1.5, 1, WaveformClass::SC), InvalidParams);
    auto model = iforest_fit(pts, 10, 16, 0.02, 1, WaveformClass::SC);
    CHECK_THROWS_AS(anomaly_score(model, {1.0}), InvalidInput);  // dim mismatch
    IsolationForestModel unfitted;
    CHECK_THROWS_AS(anomaly_score(unfitted, {1.0, 2.0}), InvalidState);
}
