#include "wosr/iforest.hpp"

#include <algorithm>
#include <cmath>

namespace wosr {

namespace {
constexpr double kEulerGamma = 0.5772156649;

// Builds one tree over the point indices in `slice` (mutated in place).
struct TreeBuilder {
    const std::vector<std::vector<double>>& pts;
    Rng& rng;
    int depth_cap;
    std::vector<ITreeNode> nodes;

    int32_t grow(std::vector<size_t>& slice, size_t lo, size_t hi, int depth) {
        const auto idx = static_cast<int32_t>(nodes.size());
        nodes.emplace_back();
        const size_t count = hi - lo;
        if (depth >= depth_cap || count <= 1) {
            nodes[idx].size = static_cast<int32_t>(count);
            return idx;
        }

        const size_t n_dims = pts[slice[lo]].size();
        const auto dim = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(n_dims) - 1));
        double mn = pts[slice[lo]][dim], mx = mn;
        for (size_t i = lo + 1; i < hi; ++i) {
            const double v = pts[slice[i]][dim];
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        // Split strictly inside (mn, mx), snapped to f32 for serialization.
        double split = 0.0;
        bool ok = false;
        for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
            split = static_cast<double>(static_cast<float>(rng.uniform(mn, mx)));
            ok = split > mn && split < mx;
        }
        if (!ok) {  // degenerate (zero-variance or f32-tight) range
            nodes[idx].size = static_cast<int32_t>(count);
            return idx;
        }

        auto mid_it = std::partition(slice.begin() + static_cast<ptrdiff_t>(lo),
                                     slice.begin() + static_cast<ptrdiff_t>(hi),
                                     [&](size_t p) { return pts[p][dim] < split; });
        const auto mid = static_cast<size_t>(mid_it - slice.begin());
        nodes[idx].split_dim = static_cast<int32_t>(dim);
        nodes[idx].split_value = split;
        nodes[idx].size = static_cast<int32_t>(count);
        const int32_t left = grow(slice, lo, mid, depth + 1);
        nodes[idx].left = left;
        const int32_t right = grow(slice, mid, hi, depth + 1);
        nodes[idx].right = right;
        return idx;
    }
};

double path_length(const ITree& tree, const std::vector<double>& x) {
    int32_t node = 0;
    double depth = 0.0;
    while (true) {
        const ITreeNode& nd = tree.nodes[static_cast<size_t>(node)];
        if (nd.split_dim < 0)
            return depth + c_factor(static_cast<size_t>(nd.size));
        node = x[static_cast<size_t>(nd.split_dim)] < nd.split_value ? nd.left : nd.right;
        depth += 1.0;
    }
}
}  // namespace

double c_factor(size_t n) {
    if (n < 2) return 0.0;
    const double m = static_cast<double>(n) - 1.0;
    return 2.0 * (std::log(m) + kEulerGamma) - 2.0 * m / static_cast<double>(n);
}

int IsolationForestModel::max_depth() const {
    return static_cast<int>(std::ceil(std::log2(static_cast<double>(psi))));
}

IsolationForestModel iforest_fit(const std::vector<std::vector<double>>& points, size_t n_trees,
                                 size_t psi, double contamination, uint64_t seed,
                                 WaveformClass tag) {
    if (n_trees < 1) throw InvalidParams("iforest: need at least one tree");
    if (psi < 2) throw InvalidParams("iforest: subsample size must be >= 2");
    if (!(contamination > 0.0 && contamination < 0.5))
        throw InvalidParams("iforest: contamination must be in (0, 0.5)");
    if (points.size() < psi) throw InvalidInput("iforest: fewer points than the subsample size");
    const size_t n_dims = points[0].size();
    if (n_dims == 0) throw InvalidInput("iforest: zero-dimensional points");
    for (const auto& p : points)
        if (p.size() != n_dims) throw InvalidInput("iforest: inconsistent point dimensions");

    IsolationForestModel model;
    model.psi = psi;
    model.contamination = contamination;
    model.class_tag = tag;
    model.n_dims = n_dims;
    model.trees.resize(n_trees);

    parallel_for(n_trees, [&](size_t t0, size_t t1) {
        for (size_t t = t0; t < t1; ++t) {
            Rng rng(mix_seed(seed, fnv1a64("tree"), t));
            std::vector<size_t> slice = rng.sample_without_replacement(points.size(), psi);
            TreeBuilder builder{points, rng, model.max_depth(), {}};
            builder.grow(slice, 0, slice.size(), 0);
            model.trees[t].nodes = std::move(builder.nodes);
        }
    });
    model.fitted = true;

    // Threshold = k-th smallest training score, k = floor((1-contamination) n),
    // so the strictly-above fraction is ~contamination.
    std::vector<double> scores(points.size());
    parallel_for(points.size(), [&](size_t i0, size_t i1) {
        for (size_t i = i0; i < i1; ++i) scores[i] = anomaly_score(model, points[i]);
    });
    std::sort(scores.begin(), scores.end());
    auto k = static_cast<size_t>(std::floor((1.0 - contamination) *
                                            static_cast<double>(points.size())));
    k = std::clamp<size_t>(k, 1, points.size());
    // Snap to f32 for the container, rounding up so the quantile point itself
    // still lands at-or-below the threshold.
    float thresh = static_cast<float>(scores[k - 1]);
    if (static_cast<double>(thresh) < scores[k - 1]) thresh = std::nextafterf(thresh, 2.0f);
    model.score_threshold = static_cast<double>(thresh);
    size_t flagged = 0;
    for (double s : scores) flagged += s > model.score_threshold ? 1 : 0;
    model.train_flag_rate = static_cast<double>(flagged) / static_cast<double>(points.size());
    return model;
}

double anomaly_score(const IsolationForestModel& model, const std::vector<double>& x) {
    if (!model.fitted) throw InvalidState("iforest: model is not fitted");
    if (x.size() != model.n_dims) throw InvalidInput("iforest: point dimension mismatch");
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += path_length(tree, x);
    const double mean_h = sum / static_cast<double>(model.trees.size());
    return std::pow(2.0, -mean_h / c_factor(model.psi));
}

std::pair<bool, double> is_outlier(const IsolationForestModel& model,
                                   const std::vector<double>& x) {
    const double s = anomaly_score(model, x);
    return {s > model.score_threshold, s};
}

}  // namespace wosr
