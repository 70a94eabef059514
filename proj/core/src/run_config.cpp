#include "vrbq/run_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vrbq {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& prefix, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    const std::string field = prefix.empty() ? key : prefix + "." + std::string(key);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        fail(field, "wrong type (" + std::string(v.type_name()) + ")");
    }
}

}  // namespace

void LayerConfig::validate() const {
    if (neurons <= 0) throw ConfigError("config field 'layer.neurons': must be positive");
    if (sigma_xy_lo <= 0.0 || sigma_xy_lo >= sigma_xy_hi || sigma_xy_hi > 1.0)
        throw ConfigError("config field 'layer.sigma_xy': range must satisfy 0 < lo < hi <= 1");
    if (sigma_z <= 0.0) throw ConfigError("config field 'layer.sigma_z': must be positive");
}

void RunConfig::validate() const {
    if (schema_version != 1)
        throw ConfigError("config field 'schema_version': unsupported version " +
                          std::to_string(schema_version));
    try {
        env.validate();
        train.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    layer.validate();
    if (output_dir.empty()) throw ConfigError("config field 'output_dir': must be non-empty");
}

RunConfig parse_run_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse " + origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be a JSON object");
    check_keys(root, "", {"schema_version", "scenario", "env", "layer", "train", "output_dir"});

    RunConfig cfg;
    cfg.schema_version = get_or<int>(root, "", "schema_version", -1);
    if (cfg.schema_version == -1) fail("schema_version", "required");
    cfg.scenario = scenario_from_string(get_or<std::string>(root, "", "scenario", "shooter"));
    cfg.output_dir = get_or<std::string>(root, "", "output_dir", cfg.output_dir);

    if (root.contains("env")) {
        const json& e = root.at("env");
        if (!e.is_object()) fail("env", "must be an object");
        check_keys(e, "env",
                   {"width", "height", "channels", "skip_frames", "stack", "timeout", "seed"});
        cfg.env.width = get_or<int>(e, "env", "width", cfg.env.width);
        cfg.env.height = get_or<int>(e, "env", "height", cfg.env.height);
        cfg.env.channels = get_or<int>(e, "env", "channels", cfg.env.channels);
        cfg.env.skip_frames = get_or<int>(e, "env", "skip_frames", cfg.env.skip_frames);
        cfg.env.stack = get_or<int>(e, "env", "stack", cfg.env.stack);
        cfg.env.timeout = get_or<int>(e, "env", "timeout", cfg.env.timeout);
        cfg.env.seed = get_or<std::uint64_t>(e, "env", "seed", cfg.env.seed);
    }

    if (root.contains("layer")) {
        const json& l = root.at("layer");
        if (!l.is_object()) fail("layer", "must be an object");
        check_keys(l, "layer", {"seed", "neurons", "sigma_xy_lo", "sigma_xy_hi", "sigma_z", "file"});
        cfg.layer.seed = get_or<std::uint64_t>(l, "layer", "seed", cfg.layer.seed);
        cfg.layer.neurons = get_or<int>(l, "layer", "neurons", cfg.layer.neurons);
        cfg.layer.sigma_xy_lo = get_or<double>(l, "layer", "sigma_xy_lo", cfg.layer.sigma_xy_lo);
        cfg.layer.sigma_xy_hi = get_or<double>(l, "layer", "sigma_xy_hi", cfg.layer.sigma_xy_hi);
        cfg.layer.sigma_z = get_or<double>(l, "layer", "sigma_z", cfg.layer.sigma_z);
        cfg.layer.file = get_or<std::string>(l, "layer", "file", cfg.layer.file);
    }

    if (root.contains("train")) {
        const json& t = root.at("train");
        if (!t.is_object()) fail("train", "must be an object");
        check_keys(t, "train",
                   {"total_steps", "batch_size", "learning_rate", "gamma", "epsilon",
                    "target_update_period", "replay_capacity", "eval_episodes", "seeds"});
        cfg.train.total_steps =
            get_or<std::int64_t>(t, "train", "total_steps", cfg.train.total_steps);
        cfg.train.batch_size =
            get_or<std::size_t>(t, "train", "batch_size", cfg.train.batch_size);
        cfg.train.learning_rate =
            get_or<double>(t, "train", "learning_rate", cfg.train.learning_rate);
        cfg.train.gamma = get_or<double>(t, "train", "gamma", cfg.train.gamma);
        if (t.contains("epsilon")) {
            const json& ep = t.at("epsilon");
            if (!ep.is_object()) fail("train.epsilon", "must be an object");
            check_keys(ep, "train.epsilon", {"start", "end", "decay_start", "decay_steps"});
            cfg.train.epsilon.start =
                get_or<double>(ep, "train.epsilon", "start", cfg.train.epsilon.start);
            cfg.train.epsilon.end =
                get_or<double>(ep, "train.epsilon", "end", cfg.train.epsilon.end);
            cfg.train.epsilon.decay_start = get_or<std::int64_t>(
                ep, "train.epsilon", "decay_start", cfg.train.epsilon.decay_start);
            cfg.train.epsilon.decay_steps = get_or<std::int64_t>(
                ep, "train.epsilon", "decay_steps", cfg.train.epsilon.decay_steps);
        }
        if (t.contains("target_update_period") && !t.at("target_update_period").is_null())
            cfg.train.target_update_period =
                get_or<std::int64_t>(t, "train", "target_update_period", 0);
        cfg.train.replay_capacity =
            get_or<std::size_t>(t, "train", "replay_capacity", cfg.train.replay_capacity);
        cfg.train.eval_episodes =
            get_or<int>(t, "train", "eval_episodes", cfg.train.eval_episodes);
        cfg.train.seeds =
            get_or<std::vector<std::uint64_t>>(t, "train", "seeds", cfg.train.seeds);
    }

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

std::string run_config_to_json(const RunConfig& cfg) {
    json root;
    root["schema_version"] = cfg.schema_version;
    root["scenario"] = to_string(cfg.scenario);
    root["env"] = {{"width", cfg.env.width},
                   {"height", cfg.env.height},
                   {"channels", cfg.env.channels},
                   {"skip_frames", cfg.env.skip_frames},
                   {"stack", cfg.env.stack},
                   {"timeout", cfg.env.timeout},
                   {"seed", cfg.env.seed}};
    root["layer"] = {{"seed", cfg.layer.seed},
                     {"neurons", cfg.layer.neurons},
                     {"sigma_xy_lo", cfg.layer.sigma_xy_lo},
                     {"sigma_xy_hi", cfg.layer.sigma_xy_hi},
                     {"sigma_z", cfg.layer.sigma_z},
                     {"file", cfg.layer.file}};
    json train = {{"total_steps", cfg.train.total_steps},
                  {"batch_size", cfg.train.batch_size},
                  {"learning_rate", cfg.train.learning_rate},
                  {"gamma", cfg.train.gamma},
                  {"epsilon",
                   {{"start", cfg.train.epsilon.start},
                    {"end", cfg.train.epsilon.end},
                    {"decay_start", cfg.train.epsilon.decay_start},
                    {"decay_steps", cfg.train.epsilon.decay_steps}}},
                  {"replay_capacity", cfg.train.replay_capacity},
                  {"eval_episodes", cfg.train.eval_episodes},
                  {"seeds", cfg.train.seeds}};
    if (cfg.train.target_update_period)
        train["target_update_period"] = *cfg.train.target_update_period;
    else
        train["target_update_period"] = nullptr;
    root["train"] = train;
    root["output_dir"] = cfg.output_dir;
    return root.dump(2);
}

}  // namespace vrbq
