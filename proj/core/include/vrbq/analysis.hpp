#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vrbq/envsim.hpp"
#include "vrbq/qlearn.hpp"
#include "vrbq/rbf.hpp"

namespace vrbq {

// Active/inactive split of a layer's neurons over a calibration state set.
// A neuron is active when any frame slot of any state drives it above the
// threshold.
struct NeuronClassification {
    std::vector<int> active;           // ascending neuron indices
    std::vector<int> inactive;         // ascending, complement of active
    std::vector<double> max_activation;  // per neuron, over all states and slots
    double threshold = 0.01;
    std::size_t n_states = 0;

    double active_fraction() const {
        return max_activation.empty()
                   ? 0.0
                   : static_cast<double>(active.size()) / max_activation.size();
    }
};

NeuronClassification classify_neurons(const RbfLayer& layer,
                                      const std::vector<State>& states,
                                      double threshold = 0.01);

// Per-neuron |h(s) - h(s')| between the newest frames of two states, with the
// classification splits and the neuron spatial centers for map overlays.
struct ActivationDiff {
    std::vector<double> delta;                         // per neuron
    std::vector<int> active;                           // from the classification
    std::vector<int> inactive;
    std::vector<std::pair<double, double>> centers;    // (mu_x, mu_y) per neuron
};

ActivationDiff activation_diff(const RbfLayer& layer, const State& s, const State& s2,
                               const NeuronClassification& classification);

struct TraceSample {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double activation = 0.0;
    bool below_threshold = false;
};

// Pose/activation record of one neuron along a random rollout.
struct NeuronTrace {
    int neuron = 0;
    double threshold = 0.0;
    std::vector<TraceSample> samples;
};

NeuronTrace neuron_trace(const RbfLayer& layer, Env& env, std::uint64_t rollout_seed,
                         int n_samples, int neuron, double threshold);

struct PrunedNetwork {
    RbfLayer layer;
    QHead head;
};

// Drops inactive neurons from the layer and the matching weight columns (every
// frame slot of each kept neuron), preserving order. Evaluation-time only; no
// retraining.
PrunedNetwork prune_to_active(const RbfLayer& layer, const QHead& head,
                              const NeuronClassification& classification);

// Calibration-state generator: random policy where each action is repeated a
// random number of ticks in [0,12], episodes reseeded on termination.
std::vector<State> generate_calibration_states(Env& env, std::uint64_t seed, int n_states);

// CSV/PGM artifact writers.
void write_classification_csv(const NeuronClassification& cls, const std::string& path);
void write_diff_histogram_csv(const ActivationDiff& diff, int n_bins, const std::string& path);
void write_trace_csv(const NeuronTrace& trace, const std::string& path);

// Reads back the neuron->label CSV written above (used by eval --only-active).
NeuronClassification read_classification_csv(const std::string& path);

}  // namespace vrbq
