#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vrbq/errors.hpp"
#include "vrbq/rng.hpp"

namespace vrbq {

using FeatureVector = Eigen::VectorXd;

// One pixel frame, channel-planar layout: data[ch*w*h + py*w + px].
// Intensities are expected in [0,1].
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    Frame() = default;
    Frame(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    double& at(int ch, int px, int py) {
        return data[(static_cast<std::size_t>(ch) * height + py) * width + px];
    }
    double at(int ch, int px, int py) const {
        return data[(static_cast<std::size_t>(ch) * height + py) * width + px];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool same_shape(const Frame& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Stack of K consecutive frames, oldest first.
struct State {
    std::vector<Frame> frames;

    int stack_size() const { return static_cast<int>(frames.size()); }
    const Frame& newest() const { return frames.back(); }
};

// One hidden unit: a spatial Gaussian window (mu_x, mu_y, sigma_x, sigma_y in
// normalized image coordinates) plus a per-channel intensity Gaussian
// (mu_z[c], sigma_z[c]).
struct RbfNeuron {
    double mu_x = 0.0;
    double mu_y = 0.0;
    double sigma_x = 1.0;
    double sigma_y = 1.0;
    std::vector<double> mu_z;
    std::vector<double> sigma_z;

    bool operator==(const RbfNeuron&) const = default;
};

// Precomputed spatial window of one neuron over a w*h grid, row-major
// values[py*w + px]. Entries are in [0,1]; mathematically positive, but the
// far tail of a narrow Gaussian underflows to 0 in double precision.
struct AttentionFilter {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int px, int py) const {
        return values[static_cast<std::size_t>(py) * width + px];
    }
};

// Fixed random feature extractor. Immutable after construction; activate() is
// pure and safe to call concurrently on a shared layer.
class RbfLayer {
public:
    RbfLayer(std::vector<RbfNeuron> neurons, int width, int height, int channels,
             std::uint64_t seed);

    int size() const { return static_cast<int>(neurons_.size()); }
    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<RbfNeuron>& neurons() const { return neurons_; }
    const AttentionFilter& filter(int i) const { return filters_[i]; }

    // Keeps only the given neurons (ascending order expected); used by pruning.
    RbfLayer restricted_to(const std::vector<int>& keep) const;

    bool operator==(const RbfLayer& o) const {
        return neurons_ == o.neurons_ && width_ == o.width_ && height_ == o.height_ &&
               channels_ == o.channels_ && seed_ == o.seed_;
    }

private:
    std::vector<RbfNeuron> neurons_;
    std::vector<AttentionFilter> filters_;
    int width_;
    int height_;
    int channels_;
    std::uint64_t seed_;
};

// Spatial window of `neuron` on a w*h pixel grid. Entry (px,py) is
//   exp(-((px/w - mu_x)^2 / (2 sigma_x^2) + (py/h - mu_y)^2 / (2 sigma_y^2)))
// with zero-based pixel indices normalized by w and h.
AttentionFilter compute_filter(const RbfNeuron& neuron, int width, int height);

// Draws a layer of n i.i.d. neurons: centers uniform in [0,1] (spatial and
// intensity), sigma_x/sigma_y uniform in [sigma_xy_lo, sigma_xy_hi], sigma_z
// fixed. Same arguments always produce the same layer.
RbfLayer sample_layer(std::uint64_t seed, int n_neurons, int width, int height,
                      int channels, double sigma_xy_lo, double sigma_xy_hi,
                      double sigma_z);

// Activations of all neurons on one frame:
//   h_i = exp(-sum_c [ sum_p ((S_cp - mu_z_ic) * G_ip)^2 ] / (2 sigma_z_ic^2))
// Summation order is fixed: channels outer, then rows, then columns.
FeatureVector activate(const RbfLayer& layer, const Frame& frame);

// Per-frame activation of a stack, concatenated oldest frame first (K*N values).
FeatureVector activate_state(const RbfLayer& layer, const State& state);

// Versioned binary layer file (magic + version + geometry + neuron parameters,
// little-endian doubles). Filters are rebuilt on load; reconstruction is
// bit-exact because compute_filter is deterministic.
void save_layer(const RbfLayer& layer, const std::string& path);
RbfLayer load_layer(const std::string& path);

}  // namespace vrbq
