#include "vrbq/qlearn.hpp"

#include <cmath>

#include "binio.hpp"

namespace vrbq {

namespace {

constexpr char kHeadMagic[9] = "VRBQHEAD";
constexpr std::uint32_t kHeadVersion = 1;

void check_batch(const TdBatch& batch, const QHead& head) {
    const Eigen::Index b = batch.features.rows();
    if (b == 0) throw ShapeError("batch must be non-empty");
    if (batch.features.cols() != head.feature_dim() ||
        batch.next_features.cols() != head.feature_dim())
        throw ShapeError("batch feature dimension does not match head");
    if (batch.next_features.rows() != b || batch.rewards.size() != b ||
        static_cast<Eigen::Index>(batch.actions.size()) != b ||
        static_cast<Eigen::Index>(batch.terminal.size()) != b)
        throw ShapeError("batch field lengths disagree");
    for (int a : batch.actions)
        if (a < 0 || a >= head.action_count()) throw ShapeError("action index out of range");
}

}  // namespace

QHead::QHead(int n_actions, Eigen::Index n_features, double lr)
    : weights(Eigen::MatrixXd::Zero(n_actions, n_features)),
      adam_m(Eigen::MatrixXd::Zero(n_actions, n_features)),
      adam_v(Eigen::MatrixXd::Zero(n_actions, n_features)),
      learning_rate(lr) {
    if (n_actions <= 0 || n_features <= 0)
        throw ConfigError("QHead requires positive action and feature counts");
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
}

Eigen::VectorXd q_values(const QHead& head, const FeatureVector& features) {
    if (features.size() != head.feature_dim())
        throw ShapeError("feature length " + std::to_string(features.size()) +
                         " does not match head dimension " +
                         std::to_string(head.feature_dim()));
    return head.weights * features;
}

Eigen::VectorXd td_target(const TdBatch& batch, const QHead& head, double gamma) {
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must lie in [0,1]");
    check_batch(batch, head);
    const Eigen::Index b = batch.size();
    Eigen::VectorXd target(b);
    // B x A next-state values in one product; terminal rows discard theirs.
    Eigen::MatrixXd q_next = batch.next_features * head.weights.transpose();
    for (Eigen::Index i = 0; i < b; ++i) {
        if (batch.terminal[static_cast<std::size_t>(i)])
            target[i] = batch.rewards[i];
        else
            target[i] = batch.rewards[i] + gamma * q_next.row(i).maxCoeff();
    }
    return target;
}

LossGrad loss_and_gradient(const TdBatch& batch, const QHead& head, double gamma) {
    return loss_and_gradient(batch, head, td_target(batch, head, gamma));
}

LossGrad loss_and_gradient(const TdBatch& batch, const QHead& head,
                           const Eigen::VectorXd& target) {
    check_batch(batch, head);
    const Eigen::Index b = batch.size();
    if (target.size() != b) throw ShapeError("target length does not match batch");

    LossGrad out;
    out.grad = Eigen::MatrixXd::Zero(head.action_count(), head.feature_dim());
    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(b);
    for (Eigen::Index i = 0; i < b; ++i) {
        const int a = batch.actions[static_cast<std::size_t>(i)];
        const double q = head.weights.row(a).dot(batch.features.row(i));
        const double err = q - target[i];
        loss += err * err;
        // d/dw[a,:] of mean (q - target)^2, target held constant
        out.grad.row(a) += (2.0 * inv_b * err) * batch.features.row(i);
    }
    out.loss = loss * inv_b;
    return out;
}

void adam_step(QHead& head, const Eigen::MatrixXd& grad) {
    if (grad.rows() != head.weights.rows() || grad.cols() != head.weights.cols())
        throw ShapeError("gradient shape does not match weights");
    if (!grad.allFinite()) throw NumericError("non-finite gradient entries");

    head.step_count += 1;
    const double b1 = head.adam_beta1;
    const double b2 = head.adam_beta2;
    head.adam_m = b1 * head.adam_m + (1.0 - b1) * grad;
    head.adam_v = b2 * head.adam_v + (1.0 - b2) * grad.cwiseProduct(grad);
    const double m_corr = 1.0 - std::pow(b1, static_cast<double>(head.step_count));
    const double v_corr = 1.0 - std::pow(b2, static_cast<double>(head.step_count));
    head.weights -= (head.learning_rate / m_corr) *
                    (head.adam_m.array() /
                     ((head.adam_v.array() / v_corr).sqrt() + head.adam_eps))
                        .matrix();
}

int greedy_action(const QHead& head, const FeatureVector& features, Rng* rng,
                  double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon must lie in [0,1]");
    if (epsilon > 0.0 && rng == nullptr)
        throw ConfigError("epsilon > 0 requires a random generator");
    if (epsilon > 0.0 && uniform01(*rng) < epsilon)
        return static_cast<int>(uniform_index(*rng, static_cast<std::size_t>(head.action_count())));

    const Eigen::VectorXd q = q_values(head, features);
    int best = 0;
    for (int a = 1; a < head.action_count(); ++a)
        if (q[a] > q[best]) best = a;  // strict >: ties keep the lowest index
    return best;
}

void save_checkpoint(const QHead& head, const std::string& path) {
    detail::BinWriter w(path);
    w.magic(kHeadMagic);
    w.u32(kHeadVersion);
    w.u32(static_cast<std::uint32_t>(head.action_count()));
    w.u64(static_cast<std::uint64_t>(head.feature_dim()));
    w.f64(head.learning_rate);
    w.f64(head.adam_beta1);
    w.f64(head.adam_beta2);
    w.f64(head.adam_eps);
    w.u64(static_cast<std::uint64_t>(head.step_count));
    w.f64_array(head.weights.data(), static_cast<std::size_t>(head.weights.size()));
    w.f64_array(head.adam_m.data(), static_cast<std::size_t>(head.adam_m.size()));
    w.f64_array(head.adam_v.data(), static_cast<std::size_t>(head.adam_v.size()));
    w.finish();
}

QHead load_checkpoint(const std::string& path) {
    detail::BinReader r(path);
    r.expect_magic(kHeadMagic, "checkpoint");
    const std::uint32_t version = r.u32();
    if (version != kHeadVersion)
        throw IoError("unsupported checkpoint version " + std::to_string(version));
    const int actions = static_cast<int>(r.u32());
    const Eigen::Index features = static_cast<Eigen::Index>(r.u64());
    if (actions <= 0 || features <= 0) throw IoError("checkpoint has empty geometry");
    QHead head(actions, features, 1.0);
    head.learning_rate = r.f64();
    head.adam_beta1 = r.f64();
    head.adam_beta2 = r.f64();
    head.adam_eps = r.f64();
    head.step_count = static_cast<std::int64_t>(r.u64());
    r.f64_array(head.weights.data(), static_cast<std::size_t>(head.weights.size()));
    r.f64_array(head.adam_m.data(), static_cast<std::size_t>(head.adam_m.size()));
    r.f64_array(head.adam_v.data(), static_cast<std::size_t>(head.adam_v.size()));
    return head;
}

}  // namespace vrbq
