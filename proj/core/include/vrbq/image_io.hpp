#pragma once

#include <string>

#include "vrbq/rbf.hpp"

namespace vrbq {

// Writes a frame as binary PGM (1 channel) or PPM (3 channels), intensities
// quantized to 8 bits. Picks the format from the frame's channel count.
void write_frame_image(const Frame& frame, const std::string& path);

// Grayscale |a - b| image with marker dots overlaid at the given normalized
// (x,y) centers; used for neuron-position maps over state differences.
void write_diff_overlay(const Frame& a, const Frame& b,
                        const std::vector<std::pair<double, double>>& centers,
                        const std::string& path);

}  // namespace vrbq
