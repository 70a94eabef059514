#pragma once

#include <cstdint>
#include <vector>

#include "vrbq/qlearn.hpp"
#include "vrbq/rbf.hpp"
#include "vrbq/rng.hpp"

namespace vrbq {

// One feature-space experience. Raw frames are never stored; features are
// computed once on the way in.
struct Transition {
    FeatureVector features;
    int action = 0;
    double reward = 0.0;
    FeatureVector next_features;
    bool terminal = false;
};

// Fixed-capacity ring. Oldest entries are overwritten first once full.
// Single-threaded by contract; the trainer is the only writer and reader.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);

    // batch_size i.i.d. uniform draws with replacement over the filled region.
    TdBatch sample_uniform(std::size_t batch_size, Rng& rng) const;

    std::size_t size() const { return filled_; }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t logical) const;  // 0 = oldest surviving entry

private:
    std::size_t capacity_;
    std::vector<Transition> storage_;
    std::size_t write_cursor_ = 0;
    std::size_t filled_ = 0;
    Eigen::Index feature_dim_ = 0;
};

}  // namespace vrbq
