// Command-line driver: run the identity suite, assemble and cache Hecke
// operator discretizations, compute spectra and defect diagnostics, and
// compare the torus operator against its plane pushforward.

#include "heckelab/commands.hpp"
#include "heckelab/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using heckelab::Complex;
using heckelab::RunConfig;

std::vector<Complex> parse_points(const std::string& text)
{
    // "re,im;re,im;..."
    std::vector<Complex> out;
    std::istringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
        double re = 0.0, im = 0.0;
        if (std::sscanf(group.c_str(), "%lf,%lf", &re, &im) != 2) {
            throw heckelab::config_error("cannot parse point '" + group +
                                         "' (expected RE,IM)");
        }
        out.emplace_back(re, im);
    }
    if (out.empty()) {
        throw heckelab::config_error("empty point list");
    }
    return out;
}

std::vector<int> parse_grids(const std::string& text)
{
    std::vector<int> out;
    std::istringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
        out.push_back(std::stoi(item));
    }
    if (out.empty()) {
        throw heckelab::config_error("empty grid list");
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"heckelab: numerical laboratory for genus-one Hecke integral operators"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string grids_text;
    std::string hecke_text;
    std::string cache_path;
    long long seed = -1;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "seed for randomized identity sampling");
    app.add_option("--grid", grids_text, "grid resolutions N[,N...] (overrides config)");
    app.add_option("--hecke-x", hecke_text, "Hecke points RE,IM[;RE,IM...] (overrides config)");

    auto* identities = app.add_subcommand("identities", "run the analytic identity suite");
    auto* op = app.add_subcommand("operator", "assemble operators, cache them, write spectra");
    auto* compare = app.add_subcommand("compare-p1",
                                       "compare torus and plane-pushforward spectra");
    auto* spec = app.add_subcommand("spectrum", "eigenvalues of a cached operator");
    spec->add_option("--cache", cache_path, "EHK1 cache file")->required();
    for (CLI::App* sub : {identities, op, compare, spec}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? heckelab::default_config()
                                            : heckelab::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!grids_text.empty()) cfg.grids = parse_grids(grids_text);
        if (!hecke_text.empty()) cfg.hecke_points = parse_points(hecke_text);

        if (identities->parsed()) return heckelab::cmd_identities(cfg);
        if (op->parsed()) return heckelab::cmd_operator(cfg);
        if (compare->parsed()) return heckelab::cmd_compare_p1(cfg);
        if (spec->parsed()) return heckelab::cmd_spectrum(cfg, cache_path);
    } catch (const heckelab::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return heckelab::exit_config_error;
    } catch (const heckelab::invalid_input_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return heckelab::exit_config_error;
    } catch (const heckelab::degenerate_configuration_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return heckelab::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return heckelab::exit_check_failed;
    }
    return heckelab::exit_ok;
}
