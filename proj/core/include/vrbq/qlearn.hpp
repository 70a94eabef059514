#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vrbq/errors.hpp"
#include "vrbq/rbf.hpp"
#include "vrbq/rng.hpp"

namespace vrbq {

// Linear Q-head: Q(s,a) = sum_i w[a,i] * h_i(s). No bias term. Carries its own
// Adam state so a checkpoint resumes training bit-exactly.
struct QHead {
    Eigen::MatrixXd weights;  // actions x features
    Eigen::MatrixXd adam_m;
    Eigen::MatrixXd adam_v;
    std::int64_t step_count = 0;
    double learning_rate = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    QHead() = default;
    QHead(int n_actions, Eigen::Index n_features, double lr);

    int action_count() const { return static_cast<int>(weights.rows()); }
    Eigen::Index feature_dim() const { return weights.cols(); }
};

// One uniformly sampled minibatch of feature-space transitions.
struct TdBatch {
    Eigen::MatrixXd features;       // B x F
    std::vector<int> actions;       // B
    Eigen::VectorXd rewards;        // B
    Eigen::MatrixXd next_features;  // B x F
    std::vector<std::uint8_t> terminal;  // B

    Eigen::Index size() const { return features.rows(); }
};

Eigen::VectorXd q_values(const QHead& head, const FeatureVector& features);

// TD target per row: r if terminal, else r + gamma * max_a' Q(s', a').
// `head` is whatever network the caller bootstraps from; the V-RBQN trainer
// passes the live head, a baseline-style trainer may pass a frozen copy.
Eigen::VectorXd td_target(const TdBatch& batch, const QHead& head, double gamma);

struct LossGrad {
    double loss = 0.0;
    Eigen::MatrixXd grad;  // actions x features
};

// Mean squared TD error over the batch and its semi-gradient (bootstrap target
// treated as a constant). Rows of `grad` for actions absent from the batch
// are zero.
LossGrad loss_and_gradient(const TdBatch& batch, const QHead& head, double gamma);

// Same loss/gradient against externally supplied targets, e.g. from a frozen
// target head.
LossGrad loss_and_gradient(const TdBatch& batch, const QHead& head,
                           const Eigen::VectorXd& targets);

// In-place Adam update with bias-corrected moments. Throws NumericError on
// non-finite gradient entries without touching the head.
void adam_step(QHead& head, const Eigen::MatrixXd& grad);

// Greedy action with lowest-index tie-break; with probability epsilon a
// uniform action from `rng` instead. epsilon > 0 requires an rng.
int greedy_action(const QHead& head, const FeatureVector& features, Rng* rng,
                  double epsilon);

// Versioned binary checkpoint (weights + Adam moments + hyperparameters).
void save_checkpoint(const QHead& head, const std::string& path);
QHead load_checkpoint(const std::string& path);

}  // namespace vrbq
