#pragma once

#include <cstdint>
#include <string>

#include "vrbq/envsim.hpp"
#include "vrbq/trainer.hpp"

namespace vrbq {

// Feature-layer parameters, either sampled from `seed` or loaded from `file`.
struct LayerConfig {
    std::uint64_t seed = 7;
    int neurons = 256;
    double sigma_xy_lo = 0.02;
    double sigma_xy_hi = 0.2;
    double sigma_z = 1.0;
    std::string file;  // when non-empty, load this layer instead of sampling

    void validate() const;
};

// Whole-run configuration: the schema behind `vrbq train -c run.json` and
// friends. A saved snapshot of this struct re-runs the experiment bit-exactly.
struct RunConfig {
    int schema_version = 1;
    Scenario scenario = Scenario::shooter;
    EnvConfig env;
    LayerConfig layer;
    TrainConfig train;
    std::string output_dir = "runs/out";

    void validate() const;
};

// Strict parse: unknown keys, wrong types, and out-of-range values raise
// ConfigError naming the offending field.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& origin);

// Canonical JSON snapshot (stable key order) for manifests.
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace vrbq
