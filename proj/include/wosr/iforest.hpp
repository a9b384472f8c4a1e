#pragma once

#include "wosr/iq_record.hpp"

namespace wosr {

// Average unsuccessful-search path length in a BST of n points:
// c(n) = 2 (ln(n-1) + gamma) - 2 (n-1)/n, with c(0) = c(1) = 0.
double c_factor(size_t n);

// Flat tree node; split_dim == -1 marks an external node.
struct ITreeNode {
    int32_t split_dim = -1;
    double split_value = 0.0;  // f32-snapped at fit time
    int32_t left = -1;
    int32_t right = -1;
    int32_t size = 0;  // external nodes: training-slice size
};

struct ITree {
    std::vector<ITreeNode> nodes;  // nodes[0] is the root
};

struct IsolationForestModel {
    std::vector<ITree> trees;
    size_t psi = 256;
    double contamination = 0.02;
    double score_threshold = 0.0;
    double train_flag_rate = 0.0;  // fraction of training points above threshold
    WaveformClass class_tag = WaveformClass::SC;
    size_t n_dims = 0;
    bool fitted = false;

    int max_depth() const;
};

// Each tree grows on a seeded psi-subsample; splits pick a uniform dimension
// and a uniform value strictly inside that dimension's node range. The
// threshold is set so the flagged fraction of training points ~ contamination.
IsolationForestModel iforest_fit(const std::vector<std::vector<double>>& points, size_t n_trees,
                                 size_t psi, double contamination, uint64_t seed,
                                 WaveformClass tag);

// s(x) = 2^(-E[h(x)] / c(psi)); higher = more anomalous.
double anomaly_score(const IsolationForestModel& model, const std::vector<double>& x);

// (score > threshold, score); boundary scores count as inliers.
std::pair<bool, double> is_outlier(const IsolationForestModel& model, const std::vector<double>& x);

}  // namespace wosr
