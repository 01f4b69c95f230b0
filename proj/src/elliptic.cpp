#include "heckelab/elliptic.hpp"
#include "heckelab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

namespace heckelab {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I(0.0, 1.0);

bool finite(Complex z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

std::string cplx(Complex z)
{
    std::ostringstream os;
    os << z;
    return os.str();
}

} // namespace

struct CurveParams::Cache {
    Complex tau;
    double im_tau = 0.0;
    // coef[n] = (-1)^n exp(i pi tau (n+1/2)^2)
    std::vector<Complex> coef;
    Complex theta1_at_0;   // theta'(0)
    Complex wp_constant;   // theta'''(0) / (3 theta'(0))

    // Lazily built coarse grid of wp values over the fundamental cell,
    // used to seed Newton in wp_inverse.
    mutable std::once_flag seed_once;
    mutable std::vector<Complex> seed_z;
    mutable std::vector<Complex> seed_wp;
};

namespace detail {

ThetaDerivs theta_derivs(Complex z_reduced, const CurveParams& curve, int max_order)
{
    const auto& cache = *curve.cache;
    const Complex u = std::exp(I * pi * z_reduced);
    const Complex v = 1.0 / u;
    const Complex u2 = u * u;
    const Complex v2 = v * v;

    Complex up = u, vp = v;
    Complex s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    double scale = 0.0;
    int tiny_streak = 0;
    const int n_terms = static_cast<int>(cache.coef.size());
    for (int n = 0; n < n_terms; ++n) {
        const Complex cu = cache.coef[static_cast<std::size_t>(n)] * up;
        const Complex cv = cache.coef[static_cast<std::size_t>(n)] * vp;
        const Complex d0 = cu - cv;
        const Complex d1 = cu + cv;
        const double m = 2.0 * n + 1.0;
        s0 += d0;
        if (max_order >= 1) s1 += m * d1;
        if (max_order >= 2) s2 += (m * m) * d0;
        if (max_order >= 3) s3 += (m * m * m) * d1;
        const double mag = std::abs(cu) + std::abs(cv);
        scale = std::max({scale, std::abs(s0), std::abs(s1)});
        if (mag * (m * m * m) <= 1e-18 * (scale + 1e-290)) {
            if (++tiny_streak == 2) break;
        } else {
            tiny_streak = 0;
        }
        up *= u2;
        vp *= v2;
    }

    ThetaDerivs out;
    out.t0 = -I * s0;
    out.t1 = pi * s1;
    out.t2 = I * (pi * pi) * s2;
    out.t3 = -(pi * pi * pi) * s3;
    return out;
}

} // namespace detail

namespace {

// Centered reduction z = z0 + a + b*tau with coordinates of z0 in [-1/2, 1/2).
CellReduction reduce_centered(Complex z, Complex tau)
{
    const double im_tau = tau.imag();
    const double beta = z.imag() / im_tau;
    const long b = static_cast<long>(std::floor(beta + 0.5));
    const double alpha = z.real() - beta * tau.real();
    const long a = static_cast<long>(std::floor(alpha + 0.5));
    CellReduction red;
    red.a = a;
    red.b = b;
    red.z0 = z - (static_cast<double>(a) + static_cast<double>(b) * tau);
    return red;
}

// Quasi-periodicity multiplier: theta(z0 + a + b*tau) = mu * theta(z0).
Complex quasi_multiplier(Complex z0, Complex tau, long a, long b)
{
    const double parity = ((a + b) % 2 == 0) ? 1.0 : -1.0;
    const double bd = static_cast<double>(b);
    return parity * std::exp(-I * pi * (bd * bd * tau + 2.0 * bd * z0));
}

} // namespace

CurveParams CurveParams::make(Complex tau, std::vector<Complex> marked_points,
                              int series_terms, double tol)
{
    if (!finite(tau) || tau.imag() <= 0.0) {
        throw invalid_input_error("CurveParams: tau must be finite with Im tau > 0, got " + cplx(tau));
    }
    if (series_terms < 4 || series_terms > 4096) {
        throw invalid_input_error("CurveParams: series_terms out of range");
    }
    if (!(tol > 0.0)) {
        throw invalid_input_error("CurveParams: tol must be positive");
    }
    if (marked_points.empty() || marked_points.front() != Complex(0.0, 0.0)) {
        throw invalid_input_error("CurveParams: marked point t0 must be present and exactly 0");
    }

    CurveParams curve;
    curve.tau = tau;
    curve.marked_points = std::move(marked_points);
    curve.series_terms = series_terms;
    curve.tol = tol;

    auto cache = std::make_shared<Cache>();
    cache->tau = tau;
    cache->im_tau = tau.imag();
    cache->coef.resize(static_cast<std::size_t>(series_terms));
    for (int n = 0; n < series_terms; ++n) {
        const double h = n + 0.5;
        Complex c = std::exp(I * pi * tau * (h * h));
        if (n % 2 == 1) c = -c;
        cache->coef[static_cast<std::size_t>(n)] = c;
    }
    {
        // theta'(0) and theta'''(0) from the same series at z = 0.
        Complex s1 = 0.0, s3 = 0.0;
        for (int n = 0; n < series_terms; ++n) {
            const double m = 2.0 * n + 1.0;
            s1 += 2.0 * m * cache->coef[static_cast<std::size_t>(n)];
            s3 += 2.0 * (m * m * m) * cache->coef[static_cast<std::size_t>(n)];
        }
        cache->theta1_at_0 = pi * s1;
        const Complex theta3_at_0 = -(pi * pi * pi) * s3;
        cache->wp_constant = theta3_at_0 / (3.0 * pi * s1);
    }
    curve.cache = cache;

    auto [g2, g3] = invariants_from_tau(tau);
    curve.g2 = g2;
    curve.g3 = g3;

    // Marked points must be pairwise distinct on the curve.
    for (std::size_t i = 0; i < curve.marked_points.size(); ++i) {
        if (!finite(curve.marked_points[i])) {
            throw invalid_input_error("CurveParams: non-finite marked point");
        }
        for (std::size_t j = i + 1; j < curve.marked_points.size(); ++j) {
            if (lattice_dist(curve.marked_points[i] - curve.marked_points[j], curve) < 1e-9) {
                throw invalid_input_error("CurveParams: marked points coincide modulo the lattice");
            }
        }
    }

    // Differential-equation sanity check at a few fixed points.
    for (int k = 1; k <= 4; ++k) {
        const Complex z = (0.13 + 0.07 * k) + (0.21 + 0.06 * k) * tau;
        const auto [wp, wpp] = wp_pair(z, curve);
        const Complex resid = wpp * wpp - (4.0 * wp * wp * wp - g2 * wp - g3);
        const double scale = std::max(1.0, std::abs(wp * wp * wp));
        if (std::abs(resid) > 1e-8 * scale) {
            throw inconsistency_error("CurveParams: Weierstrass data fails the differential equation");
        }
    }
    return curve;
}

Complex theta(Complex z, const CurveParams& curve)
{
    if (!finite(z)) {
        throw invalid_input_error("theta: non-finite argument");
    }
    const auto red = reduce_centered(z, curve.tau);
    const auto derivs = detail::theta_derivs(red.z0, curve, 0);
    return quasi_multiplier(red.z0, curve.tau, red.a, red.b) * derivs.t0;
}

Complex theta_tilde(Complex z, Complex a, const CurveParams& curve)
{
    if (!finite(z) || !finite(a)) {
        throw invalid_input_error("theta_tilde: non-finite argument");
    }
    const double d = lattice_dist(a, curve);
    if (d < curve.eps_sing) {
        throw singular_argument_error("theta_tilde: second argument on the lattice", d);
    }
    return theta(z - a, curve) / theta(-a, curve);
}

Complex theta_log_deriv(Complex t, const CurveParams& curve)
{
    if (!finite(t)) {
        throw invalid_input_error("theta_log_deriv: non-finite argument");
    }
    const auto red = reduce_centered(t, curve.tau);
    if (std::abs(red.z0) < curve.eps_sing) {
        throw singular_argument_error("theta_log_deriv: argument on the lattice", std::abs(red.z0));
    }
    const auto d = detail::theta_derivs(red.z0, curve, 1);
    return d.t1 / d.t0 - 2.0 * pi * I * static_cast<double>(red.b);
}

std::pair<Complex, Complex> wp_pair(Complex z, const CurveParams& curve)
{
    if (!finite(z)) {
        throw invalid_input_error("wp_pair: non-finite argument");
    }
    const auto red = reduce_centered(z, curve.tau);
    if (std::abs(red.z0) < curve.eps_sing) {
        throw singular_argument_error("wp_pair: argument at a lattice pole", std::abs(red.z0));
    }
    const auto d = detail::theta_derivs(red.z0, curve, 3);
    const Complex logd1 = d.t1 / d.t0;
    const Complex logd2 = d.t2 / d.t0 - logd1 * logd1;
    const Complex logd3 = d.t3 / d.t0 - 3.0 * logd1 * (d.t2 / d.t0) + 2.0 * logd1 * logd1 * logd1;
    const Complex wp = -logd2 + curve.cache->wp_constant;
    const Complex wp_prime = -logd3;
    return {wp, wp_prime};
}

std::pair<Complex, Complex> invariants_from_tau(Complex tau)
{
    if (!(std::isfinite(tau.real()) && std::isfinite(tau.imag())) || tau.imag() <= 0.0) {
        throw invalid_input_error("invariants_from_tau: Im tau must be positive");
    }
    // Eisenstein series as Lambert sums in Q = e^{2 pi i tau}.
    const Complex Q = std::exp(2.0 * pi * I * tau);
    Complex e4 = 1.0, e6 = 1.0;
    Complex Qn = 1.0;
    for (int n = 1; n <= 48; ++n) {
        Qn *= Q;
        const double nd = n;
        const Complex lam = Qn / (1.0 - Qn);
        e4 += 240.0 * (nd * nd * nd) * lam;
        e6 -= 504.0 * (nd * nd * nd * nd * nd) * lam;
        if (std::abs(Qn) < 1e-22) break;
    }
    const double p4 = pi * pi * pi * pi;
    const Complex g2 = (4.0 / 3.0) * p4 * e4;
    const Complex g3 = (8.0 / 27.0) * (p4 * pi * pi) * e6;
    return {g2, g3};
}

CellReduction reduce_to_cell(Complex z, const CurveParams& curve, double sublattice_scale)
{
    if (!finite(z)) {
        throw invalid_input_error("reduce_to_cell: non-finite argument");
    }
    if (sublattice_scale != 1.0 && sublattice_scale != 0.5) {
        throw invalid_input_error("reduce_to_cell: sublattice_scale must be 1 or 1/2");
    }
    const Complex tau = curve.tau;
    const Complex w = z / sublattice_scale;
    const double beta = w.imag() / tau.imag();
    const long b = static_cast<long>(std::floor(beta));
    const double alpha = w.real() - beta * tau.real();
    const long a = static_cast<long>(std::floor(alpha));
    CellReduction red;
    red.a = a;
    red.b = b;
    red.z0 = z - sublattice_scale * (static_cast<double>(a) + static_cast<double>(b) * tau);
    return red;
}

double lattice_dist(Complex z, const CurveParams& curve, double sublattice_scale)
{
    const Complex tau = curve.tau;
    const Complex w = z / sublattice_scale;
    const double beta = w.imag() / tau.imag();
    const double alpha = w.real() - beta * tau.real();
    const long a0 = static_cast<long>(std::floor(alpha + 0.5));
    const long b0 = static_cast<long>(std::floor(beta + 0.5));
    double best = std::numeric_limits<double>::max();
    for (long da = -1; da <= 1; ++da) {
        for (long db = -1; db <= 1; ++db) {
            const Complex lat = static_cast<double>(a0 + da) + static_cast<double>(b0 + db) * tau;
            best = std::min(best, std::abs(w - lat));
        }
    }
    return best * sublattice_scale;
}

namespace {

void build_seed_grid(const CurveParams& curve)
{
    const auto& cache = *curve.cache;
    std::call_once(cache.seed_once, [&curve, &cache]() {
        constexpr int n = 64;
        cache.seed_z.reserve(n * n);
        cache.seed_wp.reserve(n * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double alpha = (i + 0.5) / n;
                const double beta = (j + 0.5) / n;
                const Complex z = alpha + beta * curve.tau;
                cache.seed_z.push_back(z);
                cache.seed_wp.push_back(wp_pair(z, curve).first);
            }
        }
    });
}

} // namespace

Complex wp_inverse(Complex c, const CurveParams& curve)
{
    if (!finite(c)) {
        throw invalid_input_error("wp_inverse: non-finite argument");
    }

    std::vector<Complex> seeds;
    if (std::abs(c) > 1e4) {
        // wp(z) ~ 1/z^2 near the pole.
        seeds.push_back(1.0 / std::sqrt(c));
    } else {
        build_seed_grid(curve);
        const auto& cache = *curve.cache;
        // Indices of the best few grid seeds.
        constexpr int n_seeds = 6;
        std::array<std::pair<double, std::size_t>, n_seeds> best;
        best.fill({std::numeric_limits<double>::max(), 0});
        for (std::size_t k = 0; k < cache.seed_wp.size(); ++k) {
            const double d = std::abs(cache.seed_wp[k] - c);
            if (d < best[n_seeds - 1].first) {
                best[n_seeds - 1] = {d, k};
                std::sort(best.begin(), best.end(),
                          [](const auto& x, const auto& y) { return x.first < y.first; });
            }
        }
        for (const auto& [d, k] : best) seeds.push_back(cache.seed_z[k]);
    }

    const double scale = std::max(1.0, std::abs(c));
    double best_resid = std::numeric_limits<double>::max();
    Complex best_z;
    for (const Complex seed : seeds) {
        Complex z = seed;
        for (int it = 0; it < 60; ++it) {
            Complex wp, wpp;
            try {
                std::tie(wp, wpp) = wp_pair(z, curve);
            } catch (const singular_argument_error&) {
                z += Complex(3e-9, 2e-9);
                continue;
            }
            const Complex h = wp - c;
            if (std::abs(h) < best_resid * scale) {
                best_resid = std::abs(h) / scale;
                best_z = z;
            }
            if (std::abs(h) <= 1e-12 * scale) break;
            if (std::abs(wpp) < 1e-13 * scale) {
                // Stalled at a branch point; nudge off and keep iterating.
                z += Complex(1e-6, 2e-6);
                continue;
            }
            z -= h / wpp;
        }
        if (best_resid <= 1e-11) break;
    }
    if (best_resid > 1e-9) {
        throw no_convergence_error("wp_inverse: Newton did not converge", best_resid);
    }

    // Deterministic representative: lexicographically smaller (Re, Im) of the
    // two cell-reduced candidates z and -z.
    const Complex z_pos = reduce_to_cell(best_z, curve).z0;
    const Complex z_neg = reduce_to_cell(-best_z, curve).z0;
    const double re_tie = 1e-12 * std::max(1.0, std::abs(z_pos.real()) + std::abs(z_neg.real()));
    if (z_neg.real() < z_pos.real() - re_tie) return z_neg;
    if (z_pos.real() < z_neg.real() - re_tie) return z_pos;
    return (z_neg.imag() < z_pos.imag()) ? z_neg : z_pos;
}

} // namespace heckelab
