#include "vrbq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vrbq {

NeuronClassification classify_neurons(const RbfLayer& layer,
                                      const std::vector<State>& states,
                                      double threshold) {
    if (states.empty()) throw StateError("classification requires at least one state");

    NeuronClassification cls;
    cls.threshold = threshold;
    cls.n_states = states.size();
    cls.max_activation.assign(static_cast<std::size_t>(layer.size()), 0.0);
    for (const State& s : states) {
        for (const Frame& frame : s.frames) {
            const FeatureVector h = activate(layer, frame);
            for (int i = 0; i < layer.size(); ++i)
                cls.max_activation[static_cast<std::size_t>(i)] =
                    std::max(cls.max_activation[static_cast<std::size_t>(i)], h[i]);
        }
    }
    for (int i = 0; i < layer.size(); ++i) {
        if (cls.max_activation[static_cast<std::size_t>(i)] > threshold)
            cls.active.push_back(i);
        else
            cls.inactive.push_back(i);
    }
    return cls;
}

ActivationDiff activation_diff(const RbfLayer& layer, const State& s, const State& s2,
                               const NeuronClassification& classification) {
    if (s.frames.empty() || s2.frames.empty())
        throw ShapeError("states must contain at least one frame");
    if (!s.newest().same_shape(s2.newest()))
        throw ShapeError("states must share frame geometry");
    if (static_cast<int>(classification.max_activation.size()) != layer.size())
        throw ShapeError("classification does not match layer size");

    // Diffs are taken on the newest frame of each stack; that is the image the
    // overlay map shows.
    const FeatureVector ha = activate(layer, s.newest());
    const FeatureVector hb = activate(layer, s2.newest());

    ActivationDiff diff;
    diff.delta.resize(static_cast<std::size_t>(layer.size()));
    diff.centers.reserve(static_cast<std::size_t>(layer.size()));
    for (int i = 0; i < layer.size(); ++i) {
        diff.delta[static_cast<std::size_t>(i)] = std::abs(ha[i] - hb[i]);
        const RbfNeuron& n = layer.neurons()[static_cast<std::size_t>(i)];
        diff.centers.emplace_back(n.mu_x, n.mu_y);
    }
    diff.active = classification.active;
    diff.inactive = classification.inactive;
    return diff;
}

NeuronTrace neuron_trace(const RbfLayer& layer, Env& env, std::uint64_t rollout_seed,
                         int n_samples, int neuron, double threshold) {
    if (neuron < 0 || neuron >= layer.size()) throw ShapeError("neuron index out of range");
    if (n_samples < 0) throw ConfigError("n_samples must be >= 0");

    NeuronTrace trace;
    trace.neuron = neuron;
    trace.threshold = threshold;
    trace.samples.reserve(static_cast<std::size_t>(n_samples));

    Rng policy_rng(derive_seed(rollout_seed, 0x7ace));
    std::uint64_t episode = 0;
    env.reset(derive_seed(rollout_seed, episode));
    while (static_cast<int>(trace.samples.size()) < n_samples) {
        const int action = static_cast<int>(
            uniform_index(policy_rng, static_cast<std::size_t>(env.action_count())));
        const int skip = static_cast<int>(uniform_index(policy_rng, 13));  // 0..12
        const StepResult res = env.step_with_skip(action, skip);

        const AgentPose pose = env.pose();
        const FeatureVector h = activate(layer, res.state.newest());
        trace.samples.push_back(
            {pose.x, pose.y, pose.heading, h[neuron], h[neuron] < threshold});
        if (res.terminal) env.reset(derive_seed(rollout_seed, ++episode));
    }
    return trace;
}

PrunedNetwork prune_to_active(const RbfLayer& layer, const QHead& head,
                              const NeuronClassification& classification) {
    if (static_cast<int>(classification.max_activation.size()) != layer.size())
        throw ShapeError("classification does not match layer size");
    if (classification.active.empty())
        throw StateError("cannot prune to an empty active set");
    if (head.feature_dim() % layer.size() != 0)
        throw ShapeError("head feature dimension is not a multiple of the neuron count");

    const Eigen::Index stack = head.feature_dim() / layer.size();
    const Eigen::Index n_old = layer.size();
    const Eigen::Index n_new = static_cast<Eigen::Index>(classification.active.size());

    PrunedNetwork out{layer.restricted_to(classification.active),
                      QHead(head.action_count(), stack * n_new, head.learning_rate)};
    out.head.adam_beta1 = head.adam_beta1;
    out.head.adam_beta2 = head.adam_beta2;
    out.head.adam_eps = head.adam_eps;
    out.head.step_count = head.step_count;
    for (Eigen::Index k = 0; k < stack; ++k) {
        for (Eigen::Index j = 0; j < n_new; ++j) {
            const Eigen::Index src = k * n_old + classification.active[static_cast<std::size_t>(j)];
            const Eigen::Index dst = k * n_new + j;
            out.head.weights.col(dst) = head.weights.col(src);
            out.head.adam_m.col(dst) = head.adam_m.col(src);
            out.head.adam_v.col(dst) = head.adam_v.col(src);
        }
    }
    return out;
}

std::vector<State> generate_calibration_states(Env& env, std::uint64_t seed, int n_states) {
    if (n_states <= 0) throw ConfigError("n_states must be positive");
    std::vector<State> states;
    states.reserve(static_cast<std::size_t>(n_states));

    Rng policy_rng(derive_seed(seed, 0xca1b));
    std::uint64_t episode = 0;
    env.reset(derive_seed(seed, episode));
    while (static_cast<int>(states.size()) < n_states) {
        const int action = static_cast<int>(
            uniform_index(policy_rng, static_cast<std::size_t>(env.action_count())));
        const int skip = static_cast<int>(uniform_index(policy_rng, 13));  // 0..12
        const StepResult res = env.step_with_skip(action, skip);
        states.push_back(res.state);
        if (res.terminal) env.reset(derive_seed(seed, ++episode));
    }
    return states;
}

void write_classification_csv(const NeuronClassification& cls, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write classification csv: " + path);
    out << "neuron,max_activation,label\n";
    char line[96];
    for (std::size_t i = 0; i < cls.max_activation.size(); ++i) {
        const bool active = cls.max_activation[i] > cls.threshold;
        std::snprintf(line, sizeof line, "%zu,%.17g,%s\n", i, cls.max_activation[i],
                      active ? "active" : "inactive");
        out << line;
    }
    if (!out.flush()) throw IoError("classification csv write failed: " + path);
}

NeuronClassification read_classification_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open classification csv: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("neuron,", 0) != 0)
        throw IoError("not a classification csv: " + path);

    NeuronClassification cls;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        const int idx = std::stoi(field);
        std::getline(ss, field, ',');
        const double max_act = std::stod(field);
        std::getline(ss, field, ',');
        if (idx != static_cast<int>(cls.max_activation.size()))
            throw IoError("classification csv rows out of order: " + path);
        cls.max_activation.push_back(max_act);
        if (field == "active")
            cls.active.push_back(idx);
        else if (field == "inactive")
            cls.inactive.push_back(idx);
        else
            throw IoError("bad label '" + field + "' in " + path);
    }
    if (cls.max_activation.empty()) throw IoError("classification csv is empty: " + path);
    return cls;
}

void write_diff_histogram_csv(const ActivationDiff& diff, int n_bins, const std::string& path) {
    if (n_bins <= 0) throw ConfigError("histogram needs at least one bin");
    std::vector<int> count_active(static_cast<std::size_t>(n_bins), 0);
    std::vector<int> count_inactive(static_cast<std::size_t>(n_bins), 0);
    auto bin_of = [&](double v) {
        // deltas live in [0,1]; the top edge folds into the last bin
        int b = static_cast<int>(v * n_bins);
        return std::min(b, n_bins - 1);
    };
    for (int i : diff.active) ++count_active[static_cast<std::size_t>(bin_of(diff.delta[static_cast<std::size_t>(i)]))];
    for (int i : diff.inactive) ++count_inactive[static_cast<std::size_t>(bin_of(diff.delta[static_cast<std::size_t>(i)]))];

    std::ofstream out(path);
    if (!out) throw IoError("cannot write diff histogram: " + path);
    out << "bin_lo,bin_hi,count_active,count_inactive\n";
    char line[96];
    for (int b = 0; b < n_bins; ++b) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%d,%d\n",
                      static_cast<double>(b) / n_bins, static_cast<double>(b + 1) / n_bins,
                      count_active[static_cast<std::size_t>(b)],
                      count_inactive[static_cast<std::size_t>(b)]);
        out << line;
    }
    if (!out.flush()) throw IoError("diff histogram write failed: " + path);
}

void write_trace_csv(const NeuronTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace csv: " + path);
    out << "x,y,heading,activation,flagged\n";
    char line[160];
    for (const TraceSample& s : trace.samples) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%d\n", s.x, s.y, s.heading,
                      s.activation, s.below_threshold ? 1 : 0);
        out << line;
    }
    if (!out.flush()) throw IoError("trace csv write failed: " + path);
}

}  // namespace vrbq
