#include "gpseg/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gpseg {

using nlohmann::json;

namespace {

Nonlinearity parse_nonlinearity(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError(field + ": expected an object with a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "cubic")
        return Nonlinearity::cubic(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "power") {
        const double p = j.at("p").get<double>();
        if (p < 0.5) throw ConfigError(field + ".p: must be >= 0.5");
        return Nonlinearity::power(j.at("lambda").get<double>(), p);
    }
    throw ConfigError(field + ".kind: unknown kind '" + kind + "'");
}

json nonlinearity_json(const Nonlinearity& n) {
    json j;
    if (n.kind() == Nonlinearity::Kind::cubic) {
        j["kind"] = "cubic";
        j["a"] = n.param1();
        j["b"] = n.param2();
    } else {
        j["kind"] = "power";
        j["lambda"] = n.param1();
        j["p"] = n.param2();
    }
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    PipelineConfig& p = cfg.pipeline;

    if (j.contains("dim")) {
        p.dim = j["dim"].get<int>();
        if (p.dim < 1) throw ConfigError("dim: must be >= 1");
    }
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        const std::string kind = d.at("kind").get<std::string>();
        if (kind == "ball") {
            p.domain.inner_radius = 0.0;
        } else if (kind == "annulus") {
            p.domain.inner_radius = d.at("inner_radius").get<double>();
            if (!(p.domain.inner_radius > 0.0 && p.domain.inner_radius < 1.0))
                throw ConfigError("domain.inner_radius: must lie in (0,1)");
        } else {
            throw ConfigError("domain.kind: unknown kind '" + kind + "'");
        }
    }
    if (j.contains("f")) p.f = parse_nonlinearity(j["f"], "f");
    if (j.contains("h")) p.h = parse_nonlinearity(j["h"], "h");
    if (j.contains("g_list")) {
        p.g_list = j["g_list"].get<std::vector<double>>();
        if (p.g_list.empty()) throw ConfigError("g_list: must not be empty");
        for (double g : p.g_list)
            if (!(g >= 1e3)) throw ConfigError("g_list: every g must be >= 1e3");
    }
    if (j.contains("gamma")) {
        p.gamma = j["gamma"].get<double>();
        if (!(p.gamma > 0.0 && p.gamma < 1.0))
            throw ConfigError("gamma: must lie in (0,1)");
    }
    if (j.contains("seed")) p.seed = j["seed"].get<uint64_t>();
    if (j.contains("grid")) {
        const auto& gj = j["grid"];
        if (gj.contains("base_count")) {
            p.outer_grid.base_count = gj["base_count"].get<int>();
            if (p.outer_grid.base_count < 16)
                throw ConfigError("grid.base_count: must be >= 16");
        }
        if (gj.contains("interface_spacing"))
            p.outer_grid.interface_spacing = gj["interface_spacing"].get<double>();
        if (gj.contains("boundary_spacing"))
            p.outer_grid.boundary_spacing = gj["boundary_spacing"].get<double>();
        if (p.outer_grid.interface_spacing <= 0 || p.outer_grid.boundary_spacing <= 0)
            throw ConfigError("grid: spacings must be > 0");
    }
    if (j.contains("blowup")) {
        const auto& bj = j["blowup"];
        if (bj.contains("T")) cfg.blowup_T = bj["T"].get<double>();
        if (bj.contains("n_nodes")) cfg.blowup_n_nodes = bj["n_nodes"].get<int>();
        if (bj.contains("spacing")) p.profile_spacing = bj["spacing"].get<double>();
        if (cfg.blowup_T < 6.0) throw ConfigError("blowup.T: must be >= 6");
        if (cfg.blowup_n_nodes < 2000) throw ConfigError("blowup.n_nodes: must be >= 2000");
    }
    if (j.contains("tolerances")) {
        const auto& tj = j["tolerances"];
        if (tj.contains("gp_tol")) p.gp_tol = tj["gp_tol"].get<double>();
        if (tj.contains("gp_max_iter")) p.gp_max_iter = tj["gp_max_iter"].get<int>();
    }
    if (j.contains("solver_base_count"))
        p.solver_base_count = j["solver_base_count"].get<int>();
    if (j.contains("cutoff_margin")) {
        p.cutoff_margin = j["cutoff_margin"].get<double>();
        if (!(p.cutoff_margin > 0.0 && p.cutoff_margin < 1.0))
            throw ConfigError("cutoff_margin: must lie in (0,1)");
    }
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("threads")) {
        cfg.threads = j["threads"].get<int>();
        if (cfg.threads < 1) throw ConfigError("threads: must be >= 1");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["dim"] = pipeline.dim;
    j["domain"] = pipeline.domain.is_ball()
                      ? json{{"kind", "ball"}}
                      : json{{"kind", "annulus"},
                             {"inner_radius", pipeline.domain.inner_radius}};
    j["f"] = nonlinearity_json(pipeline.f);
    j["h"] = nonlinearity_json(pipeline.h);
    j["g_list"] = pipeline.g_list;
    j["gamma"] = pipeline.gamma;
    j["seed"] = pipeline.seed;
    j["grid"] = {{"base_count", pipeline.outer_grid.base_count},
                 {"interface_spacing", pipeline.outer_grid.interface_spacing},
                 {"boundary_spacing", pipeline.outer_grid.boundary_spacing}};
    j["blowup"] = {{"T", blowup_T},
                   {"n_nodes", blowup_n_nodes},
                   {"spacing", pipeline.profile_spacing}};
    j["tolerances"] = {{"gp_tol", pipeline.gp_tol}, {"gp_max_iter", pipeline.gp_max_iter}};
    j["solver_base_count"] = pipeline.solver_base_count;
    j["cutoff_margin"] = pipeline.cutoff_margin;
    j["output_dir"] = output_dir;
    j["threads"] = threads;
    return j.dump();  // nlohmann objects keep keys sorted
}

std::string ExperimentConfig::config_hash() const {
    const std::string s = canonical_json();
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gpseg
