#include "vrbq/rbf.hpp"

#include <cmath>
#include <utility>

#include "binio.hpp"

namespace vrbq {

namespace {

constexpr char kLayerMagic[9] = "VRBQLAYR";
constexpr std::uint32_t kLayerVersion = 1;

void check_geometry(int width, int height, int channels) {
    if (width <= 0 || height <= 0 || channels <= 0)
        throw ConfigError("layer geometry must be positive (got " + std::to_string(width) +
                          "x" + std::to_string(height) + "x" + std::to_string(channels) + ")");
}

}  // namespace

RbfLayer::RbfLayer(std::vector<RbfNeuron> neurons, int width, int height, int channels,
                   std::uint64_t seed)
    : neurons_(std::move(neurons)), width_(width), height_(height), channels_(channels),
      seed_(seed) {
    check_geometry(width_, height_, channels_);
    if (neurons_.empty()) throw ConfigError("layer must contain at least one neuron");
    for (const RbfNeuron& n : neurons_) {
        if (static_cast<int>(n.mu_z.size()) != channels_ ||
            static_cast<int>(n.sigma_z.size()) != channels_)
            throw ShapeError("neuron intensity parameters must have one entry per channel");
        if (n.sigma_x <= 0.0 || n.sigma_y <= 0.0)
            throw ConfigError("spatial widths must be strictly positive");
        for (double sz : n.sigma_z)
            if (sz <= 0.0) throw ConfigError("intensity widths must be strictly positive");
    }
    filters_.reserve(neurons_.size());
    for (const RbfNeuron& n : neurons_) filters_.push_back(compute_filter(n, width_, height_));
}

RbfLayer RbfLayer::restricted_to(const std::vector<int>& keep) const {
    if (keep.empty()) throw StateError("cannot restrict a layer to zero neurons");
    std::vector<RbfNeuron> kept;
    kept.reserve(keep.size());
    for (int i : keep) {
        if (i < 0 || i >= size()) throw ShapeError("neuron index out of range");
        kept.push_back(neurons_[static_cast<std::size_t>(i)]);
    }
    return RbfLayer(std::move(kept), width_, height_, channels_, seed_);
}

AttentionFilter compute_filter(const RbfNeuron& neuron, int width, int height) {
    AttentionFilter f;
    f.width = width;
    f.height = height;
    f.values.resize(static_cast<std::size_t>(width) * height);
    const double inv2sx2 = 1.0 / (2.0 * neuron.sigma_x * neuron.sigma_x);
    const double inv2sy2 = 1.0 / (2.0 * neuron.sigma_y * neuron.sigma_y);
    for (int py = 0; py < height; ++py) {
        const double dy = static_cast<double>(py) / height - neuron.mu_y;
        const double ty = dy * dy * inv2sy2;
        double* row = f.values.data() + static_cast<std::size_t>(py) * width;
        for (int px = 0; px < width; ++px) {
            const double dx = static_cast<double>(px) / width - neuron.mu_x;
            row[px] = std::exp(-(dx * dx * inv2sx2 + ty));
        }
    }
    return f;
}

RbfLayer sample_layer(std::uint64_t seed, int n_neurons, int width, int height,
                      int channels, double sigma_xy_lo, double sigma_xy_hi,
                      double sigma_z) {
    if (n_neurons <= 0) throw ConfigError("n_neurons must be positive");
    check_geometry(width, height, channels);
    if (sigma_xy_lo <= 0.0 || sigma_xy_lo >= sigma_xy_hi || sigma_xy_hi > 1.0)
        throw ConfigError("sigma_xy range must satisfy 0 < lo < hi <= 1 (got [" +
                          std::to_string(sigma_xy_lo) + ", " + std::to_string(sigma_xy_hi) + "])");
    if (sigma_z <= 0.0) throw ConfigError("sigma_z must be strictly positive");

    Rng rng(seed);
    std::vector<RbfNeuron> neurons(static_cast<std::size_t>(n_neurons));
    for (RbfNeuron& n : neurons) {
        n.mu_x = uniform01(rng);
        n.mu_y = uniform01(rng);
        n.sigma_x = uniform_in(rng, sigma_xy_lo, sigma_xy_hi);
        n.sigma_y = uniform_in(rng, sigma_xy_lo, sigma_xy_hi);
        n.mu_z.resize(channels);
        n.sigma_z.assign(channels, sigma_z);
        for (double& mz : n.mu_z) mz = uniform01(rng);
    }
    return RbfLayer(std::move(neurons), width, height, channels, seed);
}

FeatureVector activate(const RbfLayer& layer, const Frame& frame) {
    if (frame.width != layer.width() || frame.height != layer.height() ||
        frame.channels != layer.channels())
        throw ShapeError("frame geometry does not match layer (" +
                         std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                         "x" + std::to_string(frame.channels) + " vs layer " +
                         std::to_string(layer.width()) + "x" + std::to_string(layer.height()) +
                         "x" + std::to_string(layer.channels()) + ")");

    const std::size_t pixels = frame.pixel_count();
    FeatureVector out(layer.size());
    for (int i = 0; i < layer.size(); ++i) {
        const RbfNeuron& n = layer.neurons()[static_cast<std::size_t>(i)];
        const double* g = layer.filter(i).values.data();
        double exponent = 0.0;
        for (int ch = 0; ch < frame.channels; ++ch) {
            const double* s = frame.data.data() + static_cast<std::size_t>(ch) * pixels;
            const double mu = n.mu_z[static_cast<std::size_t>(ch)];
            double acc = 0.0;
            for (std::size_t p = 0; p < pixels; ++p) {
                const double d = (s[p] - mu) * g[p];
                acc += d * d;
            }
            const double sz = n.sigma_z[static_cast<std::size_t>(ch)];
            exponent += acc / (2.0 * sz * sz);
        }
        out[i] = std::exp(-exponent);
    }
    return out;
}

FeatureVector activate_state(const RbfLayer& layer, const State& state) {
    if (state.frames.empty()) throw ShapeError("state must contain at least one frame");
    const int n = layer.size();
    FeatureVector out(static_cast<Eigen::Index>(state.frames.size()) * n);
    for (std::size_t k = 0; k < state.frames.size(); ++k)
        out.segment(static_cast<Eigen::Index>(k) * n, n) = activate(layer, state.frames[k]);
    return out;
}

void save_layer(const RbfLayer& layer, const std::string& path) {
    detail::BinWriter w(path);
    w.magic(kLayerMagic);
    w.u32(kLayerVersion);
    w.u64(layer.seed());
    w.u32(static_cast<std::uint32_t>(layer.width()));
    w.u32(static_cast<std::uint32_t>(layer.height()));
    w.u32(static_cast<std::uint32_t>(layer.channels()));
    w.u32(static_cast<std::uint32_t>(layer.size()));
    for (const RbfNeuron& n : layer.neurons()) {
        w.f64(n.mu_x);
        w.f64(n.mu_y);
        w.f64(n.sigma_x);
        w.f64(n.sigma_y);
        w.f64_array(n.mu_z.data(), n.mu_z.size());
        w.f64_array(n.sigma_z.data(), n.sigma_z.size());
    }
    w.finish();
}

RbfLayer load_layer(const std::string& path) {
    detail::BinReader r(path);
    r.expect_magic(kLayerMagic, "layer");
    const std::uint32_t version = r.u32();
    if (version != kLayerVersion)
        throw IoError("unsupported layer file version " + std::to_string(version));
    const std::uint64_t seed = r.u64();
    const int width = static_cast<int>(r.u32());
    const int height = static_cast<int>(r.u32());
    const int channels = static_cast<int>(r.u32());
    const int count = static_cast<int>(r.u32());
    if (count <= 0) throw IoError("layer file contains no neurons");
    std::vector<RbfNeuron> neurons(static_cast<std::size_t>(count));
    for (RbfNeuron& n : neurons) {
        n.mu_x = r.f64();
        n.mu_y = r.f64();
        n.sigma_x = r.f64();
        n.sigma_y = r.f64();
        n.mu_z.resize(channels);
        n.sigma_z.resize(channels);
        r.f64_array(n.mu_z.data(), n.mu_z.size());
        r.f64_array(n.sigma_z.data(), n.sigma_z.size());
    }
    return RbfLayer(std::move(neurons), width, height, channels, seed);
}

}  // namespace vrbq
