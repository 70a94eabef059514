#pragma once

// Small binary file helpers shared by the layer and checkpoint formats.
// All multi-byte fields are little-endian; we require a little-endian host.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vrbq/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

namespace vrbq::detail {

class BinWriter {
public:
    explicit BinWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open for writing: " + path);
        path_ = path;
    }

    void magic(const char (&m)[9]) { out_.write(m, 8); }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void f64_array(const double* p, std::size_t n) { raw(p, n * sizeof(double)); }

    void finish() {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path_);
    }

private:
    void raw(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    std::ofstream out_;
    std::string path_;
};

class BinReader {
public:
    explicit BinReader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open: " + path);
        path_ = path;
    }

    void expect_magic(const char (&m)[9], const char* what) {
        char got[8];
        raw(got, 8);
        if (std::memcmp(got, m, 8) != 0)
            throw IoError(std::string("bad magic in ") + what + " file: " + path_);
    }
    std::uint32_t u32() { std::uint32_t v; raw(&v, sizeof v); return v; }
    std::uint64_t u64() { std::uint64_t v; raw(&v, sizeof v); return v; }
    double f64() { double v; raw(&v, sizeof v); return v; }
    void f64_array(double* p, std::size_t n) { raw(p, n * sizeof(double)); }

private:
    void raw(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) throw IoError("truncated or unreadable file: " + path_);
    }
    std::ifstream in_;
    std::string path_;
};

}  // namespace vrbq::detail
