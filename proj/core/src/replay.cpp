#include "vrbq/replay.hpp"

#include <utility>

namespace vrbq {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
    storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (t.features.size() != t.next_features.size())
        throw ShapeError("transition feature lengths disagree");
    if (filled_ == 0 && storage_.empty()) {
        feature_dim_ = t.features.size();
    } else if (t.features.size() != feature_dim_) {
        throw ShapeError("transition feature length " + std::to_string(t.features.size()) +
                         " does not match buffer contents (" + std::to_string(feature_dim_) + ")");
    }

    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[write_cursor_] = std::move(t);
    }
    write_cursor_ = (write_cursor_ + 1) % capacity_;
    if (filled_ < capacity_) ++filled_;
}

const Transition& ReplayBuffer::at(std::size_t logical) const {
    if (logical >= filled_) throw StateError("replay index out of range");
    if (filled_ < capacity_) return storage_[logical];
    return storage_[(write_cursor_ + logical) % capacity_];
}

TdBatch ReplayBuffer::sample_uniform(std::size_t batch_size, Rng& rng) const {
    if (filled_ == 0) throw StateError("cannot sample from an empty replay buffer");
    if (batch_size == 0) throw ConfigError("batch size must be positive");

    TdBatch batch;
    batch.features.resize(static_cast<Eigen::Index>(batch_size), feature_dim_);
    batch.next_features.resize(static_cast<Eigen::Index>(batch_size), feature_dim_);
    batch.rewards.resize(static_cast<Eigen::Index>(batch_size));
    batch.actions.resize(batch_size);
    batch.terminal.resize(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        const Transition& t = storage_[uniform_index(rng, filled_)];
        const auto row = static_cast<Eigen::Index>(i);
        batch.features.row(row) = t.features;
        batch.next_features.row(row) = t.next_features;
        batch.rewards[row] = t.reward;
        batch.actions[i] = t.action;
        batch.terminal[i] = t.terminal ? 1 : 0;
    }
    return batch;
}

}  // namespace vrbq
