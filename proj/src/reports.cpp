#include "heckelab/commands.hpp"
#include "heckelab/errors.hpp"
#include "heckelab/identities.hpp"
#include "heckelab/operator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace heckelab {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt_g(double v, int prec = 17)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw config_error("cannot write output file: " + path.string());
    }
    out << text;
}

ordered_json complex_json(Complex z)
{
    return ordered_json::array({z.real(), z.imag()});
}

std::string cache_name(const std::string& kind, Complex x, int N)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "operator_%s_x%.6g_%.6g_N%d.ehk1", kind.c_str(), x.real(),
                  x.imag(), N);
    return buf;
}

// Load a matching cache or assemble freshly; warns (to stderr) and
// recomputes when the cached metadata disagrees.
OperatorMatrix obtain_operator(const std::string& kind, Complex x, int N,
                               const CurveParams& curve, const fs::path& out_dir)
{
    const fs::path path = out_dir / cache_name(kind, x, N);
    OperatorMatrix expected;
    expected.kind = kind;
    expected.x = x;
    expected.tau = curve.tau;
    expected.N = N;
    expected.symmetrized = true;

    OperatorMatrix cached;
    bool loaded = false;
    try {
        loaded = load_operator(path.string(), cached);
    } catch (const invalid_input_error& e) {
        std::cerr << "warning: unreadable cache " << path.string() << " (" << e.what()
                  << "), recomputing\n";
    }
    if (loaded) {
        if (metadata_matches(cached, expected)) {
            return cached;
        }
        std::cerr << "warning: cache metadata mismatch for " << path.string()
                  << ", recomputing\n";
    }

    const QuadGrid grid = build_grid(N, curve);
    OperatorMatrix fresh;
    if (kind == "m0") {
        fresh = assemble_m0(x, grid, curve);
    } else {
        fresh = assemble_p1(x, to_plane(grid, curve), curve);
    }
    fs::create_directories(out_dir);
    save_operator(path.string(), fresh);
    return fresh;
}

} // namespace

int cmd_identities(const RunConfig& cfg)
{
    const CurveParams curve = cfg.curve();
    const auto records = run_identity_suite(curve, cfg.seed, cfg.samples, cfg.tol);

    bool all_pass = true;
    ordered_json recs = ordered_json::array();
    for (const auto& r : records) {
        all_pass = all_pass && r.pass;
        recs.push_back({{"name", r.name},
                        {"samples", r.samples},
                        {"max_residual", r.max_residual},
                        {"tol", r.tol},
                        {"pass", r.pass}});
    }
    ordered_json doc{{"command", "identities"},
                     {"version", version_string()},
                     {"seed", cfg.seed},
                     {"tau", complex_json(cfg.tau)},
                     {"tol", cfg.tol},
                     {"samples", cfg.samples},
                     {"records", recs},
                     {"pass", all_pass}};
    write_text(fs::path(cfg.out_dir) / "identities.json", doc.dump(2) + "\n");
    return all_pass ? exit_ok : exit_check_failed;
}

int cmd_operator(const RunConfig& cfg)
{
    if (cfg.m != 0) {
        throw config_error("operator command requires m = 0");
    }
    const CurveParams curve = cfg.curve();
    const fs::path out_dir(cfg.out_dir);
    std::vector<int> grids = cfg.grids;
    std::sort(grids.begin(), grids.end());

    bool all_pass = true;
    ordered_json defect_records = ordered_json::array();
    std::string csv = "index,eigenvalue,N,x_re,x_im\n";

    std::map<std::pair<int, int>, OperatorMatrix> ops;       // (x index, N)
    std::map<std::pair<int, int>, SpectralReport> spectra;

    for (std::size_t xi = 0; xi < cfg.hecke_points.size(); ++xi) {
        const Complex x = cfg.hecke_points[xi];
        for (int N : grids) {
            OperatorMatrix op = obtain_operator("m0", x, N, curve, out_dir);
            SpectralReport rep = spectrum(op);

            for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
                csv += std::to_string(k) + "," + fmt_g(rep.eigenvalues[k]) + "," +
                       std::to_string(N) + "," + fmt_g(x.real()) + "," + fmt_g(x.imag()) + "\n";
            }

            const double bound = 0.5 / N;
            const bool sa_pass = op.selfadjoint_defect < bound;
            all_pass = all_pass && sa_pass;
            defect_records.push_back({{"type", "selfadjoint"},
                                      {"x", complex_json(x)},
                                      {"N", N},
                                      {"defect", op.selfadjoint_defect},
                                      {"bound", bound},
                                      {"pass", sa_pass}});

            double min_entry = 0.0;
            if (op.H.size() > 0) min_entry = op.H.minCoeff();
            const bool entries_pass = min_entry >= 0.0 && op.H.allFinite();
            all_pass = all_pass && entries_pass;
            defect_records.push_back({{"type", "entry_range"},
                                      {"x", complex_json(x)},
                                      {"N", N},
                                      {"min_entry", min_entry},
                                      {"pass", entries_pass}});

            ops.emplace(std::make_pair(static_cast<int>(xi), N), std::move(op));
            spectra.emplace(std::make_pair(static_cast<int>(xi), N), std::move(rep));
        }

        // Eigenvalue Cauchy records across the N sweep.
        for (std::size_t g = 0; g + 1 < grids.size(); ++g) {
            const auto& lo = spectra.at({static_cast<int>(xi), grids[g]});
            const auto& hi = spectra.at({static_cast<int>(xi), grids[g + 1]});
            double max_change = 0.0;
            const int top = std::min<int>(cfg.top_k, static_cast<int>(lo.eigenvalues.size()));
            for (int k = 0; k < top; ++k) {
                const double denom = std::max(1e-300, std::abs(hi.eigenvalues[k]));
                max_change =
                    std::max(max_change, std::abs(hi.eigenvalues[k] - lo.eigenvalues[k]) / denom);
            }
            defect_records.push_back({{"type", "eigen_cauchy"},
                                      {"x", complex_json(x)},
                                      {"N_from", grids[g]},
                                      {"N_to", grids[g + 1]},
                                      {"top_k", cfg.top_k},
                                      {"max_rel_change", max_change}});
        }
    }

    // Commutator defects for every pair of Hecke points on every grid.
    for (std::size_t xi = 0; xi < cfg.hecke_points.size(); ++xi) {
        for (std::size_t xj = xi + 1; xj < cfg.hecke_points.size(); ++xj) {
            std::vector<double> defects;
            for (int N : grids) {
                const double d = commutator_defect(ops.at({static_cast<int>(xi), N}),
                                                   ops.at({static_cast<int>(xj), N}));
                defects.push_back(d);
                defect_records.push_back({{"type", "commutator"},
                                          {"x", complex_json(cfg.hecke_points[xi])},
                                          {"y", complex_json(cfg.hecke_points[xj])},
                                          {"N", N},
                                          {"defect", d}});
            }
            if (defects.size() >= 2) {
                bool decreasing = true;
                for (std::size_t g = 0; g + 1 < defects.size(); ++g) {
                    decreasing = decreasing && defects[g + 1] < defects[g];
                }
                defect_records.push_back({{"type", "commutator_trend"},
                                          {"x", complex_json(cfg.hecke_points[xi])},
                                          {"y", complex_json(cfg.hecke_points[xj])},
                                          {"grids", grids},
                                          {"defects", defects},
                                          {"decreasing", decreasing}});
            }
        }
    }

    ordered_json doc{{"command", "operator"},
                     {"version", version_string()},
                     {"tau", complex_json(cfg.tau)},
                     {"grids", grids},
                     {"records", defect_records},
                     {"pass", all_pass}};
    write_text(out_dir / "defects.json", doc.dump(2) + "\n");
    write_text(out_dir / "eigenvalues.csv", csv);
    return all_pass ? exit_ok : exit_check_failed;
}

int cmd_compare_p1(const RunConfig& cfg)
{
    if (cfg.m != 0) {
        throw config_error("compare-p1 command requires m = 0");
    }
    const CurveParams curve = cfg.curve();
    const fs::path out_dir(cfg.out_dir);
    const Complex x = cfg.hecke_points.front();
    std::vector<int> grids = cfg.grids;
    std::sort(grids.begin(), grids.end());

    ordered_json records = ordered_json::array();
    std::vector<double> max_gap_by_n;
    for (int N : grids) {
        const OperatorMatrix m0 = obtain_operator("m0", x, N, curve, out_dir);
        const OperatorMatrix p1 = obtain_operator("p1", x, N, curve, out_dir);
        const SpectralReport rep_m0 = spectrum(m0);
        const SpectralReport rep_p1 = spectrum(p1);
        const int top = std::min<int>(
            {cfg.top_k, static_cast<int>(rep_m0.eigenvalues.size())});
        double max_gap = 0.0;
        for (int k = 0; k < top; ++k) {
            const double a = rep_m0.eigenvalues[k];
            const double b = rep_p1.eigenvalues[k];
            const double rel = std::abs(a - b) / std::max(std::abs(a), 1e-300);
            max_gap = std::max(max_gap, rel);
            records.push_back({{"N", N},
                               {"index", k},
                               {"m0", a},
                               {"p1", b},
                               {"rel_diff", rel}});
        }
        max_gap_by_n.push_back(max_gap);
    }

    bool pass = max_gap_by_n.back() < cfg.compare_threshold;
    bool shrinking = true;
    for (std::size_t g = 0; g + 1 < max_gap_by_n.size(); ++g) {
        shrinking = shrinking && max_gap_by_n[g + 1] <= max_gap_by_n[g];
    }
    if (max_gap_by_n.size() >= 2) pass = pass && shrinking;

    ordered_json doc{{"command", "compare-p1"},
                     {"version", version_string()},
                     {"tau", complex_json(cfg.tau)},
                     {"x", complex_json(x)},
                     {"grids", grids},
                     {"top_k", cfg.top_k},
                     {"threshold", cfg.compare_threshold},
                     {"records", records},
                     {"max_gap_by_grid", max_gap_by_n},
                     {"shrinking", shrinking},
                     {"pass", pass}};
    write_text(out_dir / "compare_p1.json", doc.dump(2) + "\n");
    return pass ? exit_ok : exit_check_failed;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& cache_path)
{
    OperatorMatrix op;
    if (!load_operator(cache_path, op)) {
        throw config_error("spectrum: cache file not found: " + cache_path +
                           " (run the operator command first)");
    }
    const SpectralReport rep = spectrum(op);
    std::string csv = "index,eigenvalue,sigma\n";
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
        csv += std::to_string(k) + "," + fmt_g(rep.eigenvalues[k]) + "," +
               fmt_g(rep.decay_profile[k]) + "\n";
    }
    write_text(fs::path(cfg.out_dir) / "spectrum.csv", csv);
    return exit_ok;
}

} // namespace heckelab
