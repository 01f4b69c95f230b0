#include "heckelab/config.hpp"
#include "heckelab/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace heckelab {

namespace {

using nlohmann::json;

Complex read_complex(const json& j, const std::string& field)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw config_error("config field '" + field + "' must be a [re, im] pair");
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
}

} // namespace

CurveParams RunConfig::curve() const
{
    return CurveParams::make(tau, marked_points, series_terms, tol);
}

RunConfig default_config()
{
    return RunConfig{};
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file: " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }

    RunConfig cfg;
    try {
        if (doc.contains("tau")) cfg.tau = read_complex(doc["tau"], "tau");
        if (doc.contains("marked_points")) {
            cfg.marked_points.clear();
            for (std::size_t i = 0; i < doc["marked_points"].size(); ++i) {
                cfg.marked_points.push_back(
                    read_complex(doc["marked_points"][i], "marked_points[" + std::to_string(i) + "]"));
            }
        }
        if (doc.contains("hecke_points")) {
            cfg.hecke_points.clear();
            for (std::size_t i = 0; i < doc["hecke_points"].size(); ++i) {
                cfg.hecke_points.push_back(
                    read_complex(doc["hecke_points"][i], "hecke_points[" + std::to_string(i) + "]"));
            }
        }
        if (doc.contains("grids")) {
            cfg.grids.clear();
            for (const auto& g : doc["grids"]) {
                if (!g.is_number_integer()) throw config_error("config field 'grids' must hold integers");
                cfg.grids.push_back(g.get<int>());
            }
        }
        if (doc.contains("m")) cfg.m = doc["m"].get<int>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("tol")) cfg.tol = doc["tol"].get<double>();
        if (doc.contains("samples")) cfg.samples = doc["samples"].get<int>();
        if (doc.contains("series_terms")) cfg.series_terms = doc["series_terms"].get<int>();
        if (doc.contains("top_k")) cfg.top_k = doc["top_k"].get<int>();
        if (doc.contains("compare_threshold"))
            cfg.compare_threshold = doc["compare_threshold"].get<double>();
        if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw config_error(std::string("config field error: ") + e.what());
    }

    // Validate before any computation.
    if (!(cfg.tau.imag() > 0.0)) {
        throw config_error("config field 'tau': Im tau must be positive");
    }
    if (cfg.marked_points.empty() || cfg.marked_points.front() != Complex(0.0, 0.0)) {
        throw config_error("config field 'marked_points': first entry must be [0, 0]");
    }
    if (cfg.hecke_points.empty()) {
        throw config_error("config field 'hecke_points': at least one Hecke point required");
    }
    if (cfg.grids.empty()) {
        throw config_error("config field 'grids': at least one resolution required");
    }
    for (int n : cfg.grids) {
        if (n < 8) throw config_error("config field 'grids': resolutions must be >= 8");
    }
    if (cfg.m != 0 && cfg.m != 1) {
        throw config_error("config field 'm': only 0 and 1 are supported");
    }
    if (!(cfg.tol > 0.0)) {
        throw config_error("config field 'tol': must be positive");
    }
    if (cfg.samples < 1) {
        throw config_error("config field 'samples': must be positive");
    }
    if (cfg.top_k < 1) {
        throw config_error("config field 'top_k': must be positive");
    }
    if (cfg.m == 1 && cfg.marked_points.size() < 2) {
        throw config_error("config: m = 1 requires a marked point t1");
    }
    return cfg;
}

} // namespace heckelab
