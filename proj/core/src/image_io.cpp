#include "vrbq/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vrbq/errors.hpp"

namespace vrbq {

namespace {

unsigned char quantize(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image: " + path);
    return out;
}

}  // namespace

void write_frame_image(const Frame& frame, const std::string& path) {
    if (frame.channels != 1 && frame.channels != 3)
        throw ShapeError("image export supports 1 or 3 channels");
    std::ofstream out = open_out(path);
    out << (frame.channels == 1 ? "P5" : "P6") << "\n"
        << frame.width << " " << frame.height << "\n255\n";
    for (int py = 0; py < frame.height; ++py)
        for (int px = 0; px < frame.width; ++px)
            for (int c = 0; c < frame.channels; ++c)
                out.put(static_cast<char>(quantize(frame.at(c, px, py))));
    if (!out.flush()) throw IoError("image write failed: " + path);
}

void write_diff_overlay(const Frame& a, const Frame& b,
                        const std::vector<std::pair<double, double>>& centers,
                        const std::string& path) {
    if (!a.same_shape(b)) throw ShapeError("overlay frames must share geometry");
    Frame diff(a.width, a.height, 1);
    for (int py = 0; py < a.height; ++py) {
        for (int px = 0; px < a.width; ++px) {
            double d = 0.0;
            for (int c = 0; c < a.channels; ++c)
                d = std::max(d, std::abs(a.at(c, px, py) - b.at(c, px, py)));
            diff.at(0, px, py) = d;
        }
    }
    for (const auto& [cx, cy] : centers) {
        const int px = std::clamp(static_cast<int>(cx * a.width), 0, a.width - 1);
        const int py = std::clamp(static_cast<int>(cy * a.height), 0, a.height - 1);
        diff.at(0, px, py) = 1.0;
    }
    write_frame_image(diff, path);
}

}  // namespace vrbq
