#include "heckelab/identities.hpp"
#include "heckelab/errors.hpp"
#include "heckelab/heckegeom.hpp"
#include "heckelab/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace heckelab {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I(0.0, 1.0);

double splitmix_to_unit(std::uint64_t z)
{
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Residual accumulator for one identity.
struct Check {
    std::string name;
    double tol;
    double worst = 0.0;
    int samples = 0;

    void add(double residual)
    {
        worst = std::max(worst, residual);
        ++samples;
    }
    IdentityRecord record() const { return {name, samples, worst, tol, worst < tol}; }
};

// Generic configuration for modification-geometry checks: every theta
// argument that appears stays clear of the lattice.
struct Triple {
    Complex p, q, x;
};

bool triple_ok(const Triple& t, const CurveParams& curve, double margin)
{
    const Complex combos[] = {t.p,       t.q,       t.x,       t.p + t.x, t.p - t.x,
                              t.q + t.x, t.q - t.x, t.p + t.q, t.p - t.q, 2.0 * t.p,
                              2.0 * t.q, 2.0 * t.x, t.p + t.q + t.x, t.p + t.q - t.x,
                              t.p - t.q + t.x, t.p - t.q - t.x};
    for (const Complex c : combos) {
        if (lattice_dist(c, curve) < margin) return false;
    }
    return true;
}

Triple generic_triple(SampleRng& rng, const CurveParams& curve, double margin = 0.045)
{
    for (int attempt = 0; attempt < 400; ++attempt) {
        Triple t{0.5 * rng.cell_point(curve, 0.08), 0.5 * rng.cell_point(curve, 0.08),
                 0.5 * rng.cell_point(curve, 0.08)};
        if (triple_ok(t, curve, margin)) return t;
    }
    throw no_convergence_error("generic_triple: sampling failed", 0.0);
}

} // namespace

double SampleRng::uniform()
{
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return splitmix_to_unit(z);
}

Complex SampleRng::cell_point(const CurveParams& curve, double margin)
{
    const double alpha = uniform(margin, 1.0 - margin);
    const double beta = uniform(margin, 1.0 - margin);
    return alpha + beta * curve.tau;
}

std::vector<IdentityRecord> elliptic_identities(const CurveParams& curve, std::uint64_t seed,
                                                int samples, double tol)
{
    SampleRng rng(seed);
    Check qp1{"theta_quasi_period_1", tol};
    Check qpt{"theta_quasi_period_tau", tol};
    Check odd{"theta_oddness", tol};
    Check ode{"wp_differential_equation", tol};
    Check dup{"wp_duplication", tol};
    Check pair{"wp_pair_identity", tol};
    Check zsym{"zsum_permutation_symmetry", tol};

    for (int k = 0; k < samples; ++k) {
        const Complex z = rng.cell_point(curve, 0.03);
        const Complex th = theta(z, curve);
        const double th_scale = std::max(1.0, std::abs(th));
        qp1.add(std::abs(theta(z + 1.0, curve) + th) / th_scale);
        qpt.add(std::abs(theta(z + curve.tau, curve) +
                         std::exp(-I * pi * (curve.tau + 2.0 * z)) * th) /
                th_scale);
        odd.add(std::abs(theta(-z, curve) + th) / th_scale);

        Complex w = rng.cell_point(curve, 0.06);
        const auto [wp, wpd] = wp_pair(w, curve);
        const Complex ode_resid = wpd * wpd - (4.0 * wp * wp * wp - curve.g2 * wp - curve.g3);
        ode.add(std::abs(ode_resid) / std::max(1.0, std::abs(wp * wp * wp)));

        // Duplication needs wp' away from zero and 2w off the lattice.
        if (std::abs(wpd) > 0.2 && lattice_dist(2.0 * w, curve) > 0.04) {
            const Complex wp2 = wp_pair(2.0 * w, curve).first;
            const Complex wpp2nd = 6.0 * wp * wp - 0.5 * curve.g2;
            const Complex dup_rhs = 0.25 * (wpp2nd / wpd) * (wpp2nd / wpd) - 2.0 * wp;
            dup.add(std::abs(wp2 - dup_rhs) / std::max(1.0, std::abs(wp2)));
        }

        // Pair identity wp(p-x) - wp(p+x) = wp'(p) wp'(x) / (wp(p) - wp(x))^2.
        const Triple t = generic_triple(rng, curve);
        const auto [wpp_val, wpp_d] = wp_pair(t.p, curve);
        const auto [wpx_val, wpx_d] = wp_pair(t.x, curve);
        if (std::abs(wpp_val - wpx_val) > 1e-3) {
            const Complex lhs = wp_pair(t.p - t.x, curve).first - wp_pair(t.p + t.x, curve).first;
            const Complex rhs = wpp_d * wpx_d / ((wpp_val - wpx_val) * (wpp_val - wpx_val));
            pair.add(std::abs(lhs - rhs) /
                     std::max(1.0, std::abs(wp_pair(t.p - t.x, curve).first) +
                                       std::abs(wp_pair(t.p + t.x, curve).first)));
        }

        // Four-term Z sum is symmetric in (p, q, x).
        const auto zsum = [&curve](Complex p, Complex q, Complex x) {
            return theta_log_deriv(p + q - x, curve) + theta_log_deriv(q + x - p, curve) -
                   theta_log_deriv(q - x - p, curve) - theta_log_deriv(q + x + p, curve);
        };
        const Complex s0 = zsum(t.p, t.q, t.x);
        const std::array<Complex, 5> perms = {zsum(t.q, t.p, t.x), zsum(t.x, t.q, t.p),
                                              zsum(t.p, t.x, t.q), zsum(t.q, t.x, t.p),
                                              zsum(t.x, t.p, t.q)};
        double worst = 0.0;
        for (const Complex sp : perms) worst = std::max(worst, std::abs(sp - s0));
        zsym.add(worst / std::max(1.0, std::abs(s0)));
    }
    return {qp1.record(), qpt.record(), odd.record(), ode.record(),
            dup.record(), pair.record(), zsym.record()};
}

std::vector<IdentityRecord> heckegeom_identities(const CurveParams& curve, std::uint64_t seed,
                                                 int samples, double tol)
{
    SampleRng rng(seed ^ 0x5851f42d4c957f2dull);
    Check root_sum{"solve_root_sum", tol};
    Check residue{"solve_residue_identity", tol};
    Check inv{"transport_inverse", tol};
    Check negq{"transport_neg_q_inversion", tol};
    Check detf{"transport_det_factor", tol};
    Check fit{"measure_fit_residual", tol};
    Check comm{"modification_commutation", std::max(tol, 1e-8)};
    Check comm_bundle{"commutation_final_bundle", std::max(tol, 1e-8)};

    const Complex t_probe = curve.marked_count() >= 1 ? curve.marked_points[1]
                                                      : Complex(0.37, 0.0);

    for (int k = 0; k < samples; ++k) {
        const Triple tr = generic_triple(rng, curve);
        const Complex p = tr.p, x = tr.x;

        // Random line parameter away from 0, infinity and the central value.
        const Complex c0v = cross_ratio(p, Complex(0.0, 0.0), x, curve);
        Complex sv;
        for (int attempt = 0;; ++attempt) {
            sv = Complex(rng.uniform(0.25, 1.6), rng.uniform(-0.8, 0.8));
            if (std::abs(sv) > 0.1 && std::abs(sv - c0v) > 0.05 * std::max(1.0, std::abs(c0v)))
                break;
            if (attempt > 100) break;
        }

        HeckeSolve sol;
        try {
            sol = solve_modification(p, x, ProjectivePoint::affine(sv), curve);
        } catch (const std::exception&) {
            continue; // rejected degenerate draw
        }
        root_sum.add(std::abs(sol.r1 + sol.r2 - 2.0 * x));

        const Complex th_a = theta(sol.r1 - 2.0 * x - p, curve);
        const Complex th_b = theta(sol.r1 - 2.0 * x + p, curve);
        const Complex th_c = theta(sol.r1 - p, curve);
        const Complex th_d = theta(sol.r1 + p, curve);
        const double rscale = std::max({1.0, std::abs(th_b), std::abs(sv * th_d)});
        residue.add(std::max(std::abs(sol.c * th_a - th_b), std::abs(sol.c * th_c - sv * th_d)) /
                    rscale);

        // Transport identities at a random probe point and random q.
        const Complex q = tr.q;
        try {
            const MobiusMap g_pq = line_transport(x, p, q, t_probe, curve);
            const MobiusMap g_qp = line_transport(x, q, p, t_probe, curve);
            inv.add(pgl_distance(g_qp, g_pq.inverse()));

            const MobiusMap g_neg = line_transport(x, p, -q, t_probe, curve);
            const ProjectivePoint y = ProjectivePoint::affine(
                Complex(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)));
            negq.add(g_neg.apply(y).distance(g_pq.apply(y).inverted()));

            const Complex t_rand = rng.cell_point(curve, 0.04);
            const MobiusMap g_t = line_transport(x, p, q, t_rand, curve);
            const Complex det = g_t.det();
            const Complex rhs = determinant_factor(p, q, x, curve) * theta(t_rand, curve) *
                                theta(t_rand - 2.0 * x, curve);
            detf.add(std::abs(det - rhs) / std::max(1.0, std::abs(det)));
        } catch (const degenerate_configuration_error&) {
        }

        try {
            fit.add(measure_polynomial(p, x, curve).fit_residual);
        } catch (const inconsistency_error&) {
        }

        // Order-exchange of two modifications (at 2x then 2y vs 2y then 2x):
        // the transported-line solves must land on the same bundle and the
        // composed transports must agree in PGL2.
        try {
            const Complex y_pt = tr.q; // reuse the generic third point
            const ProjectivePoint v = ProjectivePoint::affine(
                Complex(rng.uniform(0.3, 1.1), rng.uniform(-0.4, 0.4)));
            const ProjectivePoint w = ProjectivePoint::affine(
                Complex(rng.uniform(0.3, 1.1), rng.uniform(-0.4, 0.4)));
            const auto sol_x = solve_modification(p, x, v, curve);
            const ProjectivePoint w_after =
                line_transport(x, p, sol_x.q, 2.0 * y_pt, curve).apply(w);
            const auto sol_then_y = solve_modification(sol_x.q, y_pt, w_after, curve);

            const auto sol_y = solve_modification(p, y_pt, w, curve);
            const ProjectivePoint v_after =
                line_transport(y_pt, p, sol_y.q, 2.0 * x, curve).apply(v);
            const auto sol_then_x = solve_modification(sol_y.q, x, v_after, curve);

            const Complex wq_a = sol_then_y.wp_q;
            const Complex wq_b = sol_then_x.wp_q;
            comm_bundle.add(std::abs(wq_a - wq_b) / std::max(1.0, std::abs(wq_a)));

            Complex q2b = sol_then_x.q;
            if (lattice_dist(q2b - sol_then_y.q, curve) > lattice_dist(q2b + sol_then_y.q, curve)) {
                q2b = -q2b;
            }
            const MobiusMap lhs = compose(line_transport(y_pt, sol_x.q, sol_then_y.q, t_probe, curve),
                                          line_transport(x, p, sol_x.q, t_probe, curve));
            const MobiusMap rhs = compose(line_transport(x, sol_y.q, q2b, t_probe, curve),
                                          line_transport(y_pt, p, sol_y.q, t_probe, curve));
            comm.add(pgl_distance(lhs, rhs));
        } catch (const std::exception&) {
        }
    }
    return {root_sum.record(), residue.record(), inv.record(),  negq.record(),
            detf.record(),     fit.record(),     comm.record(), comm_bundle.record()};
}

std::vector<IdentityRecord> kernel_identities(const CurveParams& curve, std::uint64_t seed,
                                              int samples, double tol)
{
    SampleRng rng(seed ^ 0xa24baed4963ee407ull);
    Check sym{"kernel_symmetry", tol};
    Check cross{"kernel_cross_form", std::max(tol, 1e-8)};
    Check qprod{"quartic_product_form", tol};
    Check push{"kernel_plane_pushforward", std::max(tol, 1e-8)};
    Check dupc{"wp_duplication_chain", tol};

    for (int k = 0; k < samples; ++k) {
        Triple t = generic_triple(rng, curve, 0.06);
        if (singular_distance(t.p, t.q, t.x, curve) < 0.06 ||
            singular_distance(t.q, t.p, t.x, curve) < 0.06 ||
            singular_distance(t.x, t.q, t.p, curve) < 0.06) {
            continue;
        }
        const double kv = kernel_torus(t.p, t.q, t.x, curve).value;
        const double k_pq = kernel_torus(t.q, t.p, t.x, curve).value;
        const double k_px = kernel_torus(t.x, t.q, t.p, curve).value;
        const double k_qx = kernel_torus(t.p, t.x, t.q, curve).value;
        sym.add(std::max({std::abs(kv - k_pq), std::abs(kv - k_px), std::abs(kv - k_qx)}) /
                std::max(1.0, kv));

        const auto [wp_p, wd_p] = wp_pair(t.p, curve);
        const auto [wp_q, wd_q] = wp_pair(t.q, curve);
        const auto [wp_x, wd_x] = wp_pair(t.x, curve);
        const Complex quartic = symmetric_quartic(wp_q, wp_p, wp_x, curve);
        cross.add(std::abs(kv - std::abs(wd_p * wd_q * wd_x) / std::abs(quartic)) /
                  std::max(1.0, kv));

        const Complex prod = (wp_p - wp_x) * (wp_p - wp_x) *
                             (wp_q - wp_pair(t.p - t.x, curve).first) *
                             (wp_q - wp_pair(t.p + t.x, curve).first);
        qprod.add(std::abs(quartic - prod) / std::max(1.0, std::abs(quartic)));

        push.add(std::abs(kernel_plane(wp_p, wp_q, wp_x, curve) * std::abs(wd_p * wd_q) - kv) /
                 std::max(1.0, kv));

        if (lattice_dist(2.0 * t.x, curve) > 0.04) {
            const Complex lhs = wd_x * wd_x * wp_pair(2.0 * t.x, curve).first;
            const Complex rhs = wp_x * wp_x * wp_x * wp_x + 0.5 * curve.g2 * wp_x * wp_x +
                                2.0 * curve.g3 * wp_x + curve.g2 * curve.g2 / 16.0;
            dupc.add(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    return {sym.record(), cross.record(), qprod.record(), push.record(), dupc.record()};
}

std::vector<IdentityRecord> run_identity_suite(const CurveParams& curve, std::uint64_t seed,
                                               int samples, double tol)
{
    std::vector<IdentityRecord> all;
    for (auto&& rec : elliptic_identities(curve, seed, samples, tol)) all.push_back(rec);
    for (auto&& rec : heckegeom_identities(curve, seed, std::max(10, samples / 4), tol))
        all.push_back(rec);
    for (auto&& rec : kernel_identities(curve, seed, samples, tol)) all.push_back(rec);
    return all;
}

} // namespace heckelab
