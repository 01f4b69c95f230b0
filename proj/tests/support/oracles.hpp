// Test-side oracles, independent of the library evaluation paths they check.
#ifndef HECKELAB_TESTS_ORACLES_HPP
#define HECKELAB_TESTS_ORACLES_HPP

#include "heckelab/elliptic.hpp"
#include "heckelab/heckegeom.hpp"
#include "heckelab/moduli.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracles {

using heckelab::Complex;

/// Direct q-series summation of the odd theta, no argument reduction,
/// fixed 60 terms. Valid for moderate |Im z|.
inline Complex naive_theta(Complex z, Complex tau)
{
    const double pi = std::numbers::pi;
    const Complex I(0.0, 1.0);
    Complex sum = 0.0;
    for (int n = 0; n < 60; ++n) {
        const double h = n + 0.5;
        Complex term = std::exp(I * pi * tau * (h * h)) * std::sin((2.0 * n + 1.0) * pi * z);
        if (n % 2 == 1) term = -term;
        sum += term;
    }
    return 2.0 * sum;
}

/// Brute-force modification solve: scan an n x n grid of q over the
/// fundamental cell for the best |f(p,q,x) - s|, then refine by complex
/// Newton on f with the derivative assembled from theta log-derivatives.
inline Complex brute_force_solve(Complex p, Complex x, Complex s,
                                 const heckelab::CurveParams& curve, int n = 400)
{
    using heckelab::cross_ratio;
    using heckelab::cross_ratio_log_dq;
    Complex best_q;
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Complex q = (i + 0.5) / n + ((j + 0.5) / n) * curve.tau;
            try {
                const double d = std::abs(cross_ratio(p, q, x, curve) - s);
                if (d < best) {
                    best = d;
                    best_q = q;
                }
            } catch (const std::exception&) {
            }
        }
    }
    Complex q = best_q;
    for (int it = 0; it < 60; ++it) {
        const Complex f = cross_ratio(p, q, x, curve);
        if (std::abs(f - s) < 1e-13 * std::max(1.0, std::abs(s))) break;
        const Complex fq = f * cross_ratio_log_dq(p, q, x, curve);
        q -= (f - s) / fq;
    }
    return q;
}

/// Exhaustive orbit scan for the canonical representative: all |a|,|b| <= 3
/// with and without the flip, each candidate reduced into the half-cell of
/// the half-lattice, smallest (Re p, Im p, y...) kept.
inline heckelab::ModuliPoint orbit_scan_canonical(const heckelab::ModuliPoint& pt,
                                                  const heckelab::CurveParams& curve)
{
    using heckelab::GroupElement;
    using heckelab::ModuliPoint;
    auto less = [](const ModuliPoint& l, const ModuliPoint& r) {
        constexpr double band = 1e-12;
        if (l.p.real() < r.p.real() - band) return true;
        if (l.p.real() > r.p.real() + band) return false;
        if (l.p.imag() < r.p.imag() - band) return true;
        if (l.p.imag() > r.p.imag() + band) return false;
        for (std::size_t i = 0; i < l.y.size(); ++i) {
            const bool li = l.y[i].is_infinity(1e-9), ri = r.y[i].is_infinity(1e-9);
            if (li != ri) return ri;
            if (li) continue;
            const Complex lv = l.y[i].value(), rv = r.y[i].value();
            const double b = band * std::max(1.0, std::abs(lv));
            if (lv.real() < rv.real() - b) return true;
            if (lv.real() > rv.real() + b) return false;
            if (lv.imag() < rv.imag() - b) return true;
            if (lv.imag() > rv.imag() + b) return false;
        }
        return false;
    };

    bool have = false;
    ModuliPoint best;
    for (int flip = 0; flip <= 1; ++flip) {
        for (long a = -3; a <= 3; ++a) {
            for (long b = -3; b <= 3; ++b) {
                GroupElement g{flip == 1, a, b};
                ModuliPoint cand = act(g, pt, curve);
                // Reduce p into the half-cell by a further translation.
                const auto red = heckelab::reduce_to_cell(cand.p, curve, 0.5);
                if (std::abs(red.a) > 3 || std::abs(red.b) > 3) continue;
                cand = act(GroupElement::translation(-red.a, -red.b), cand, curve);
                if (!have || less(cand, best)) {
                    best = cand;
                    have = true;
                }
            }
        }
    }
    return best;
}

/// Midpoint-rule integration of a smooth integrand over an axis-aligned box
/// in the (alpha, beta) lattice frame, mapped by alpha + beta*tau. For
/// compactly supported smooth integrands the midpoint rule converges faster
/// than any power of the mesh.
template <typename F>
double integrate_frame_box(const F& f, Complex tau, double a_lo, double a_hi, double b_lo,
                           double b_hi, int n)
{
    const double da = (a_hi - a_lo) / n;
    const double db = (b_hi - b_lo) / n;
    const double jac = da * db * tau.imag();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double alpha = a_lo + (i + 0.5) * da;
            const double beta = b_lo + (j + 0.5) * db;
            total += f(alpha + beta * tau);
        }
    }
    return total * jac;
}

/// Adaptive quadtree integration over a frame box for bounded integrands:
/// panels are refined while the 1-point and 2x2 midpoint estimates disagree.
template <typename F>
double integrate_adaptive(const F& f, Complex tau, double a_lo, double a_hi, double b_lo,
                          double b_hi, double tol, int depth = 0)
{
    const double jac = (a_hi - a_lo) * (b_hi - b_lo) * tau.imag();
    const double am = 0.5 * (a_lo + a_hi), bm = 0.5 * (b_lo + b_hi);
    const double coarse = f(am + bm * tau) * jac;
    double fine = 0.0;
    const double aq = 0.25 * (a_hi - a_lo), bq = 0.25 * (b_hi - b_lo);
    const double pts[4][2] = {{am - aq, bm - bq}, {am + aq, bm - bq},
                              {am - aq, bm + bq}, {am + aq, bm + bq}};
    for (const auto& pt : pts) fine += f(pt[0] + pt[1] * tau);
    fine *= 0.25 * jac;
    if (depth >= 14 || std::abs(fine - coarse) <= tol) return fine;
    const double child_tol = tol * 0.25;
    return integrate_adaptive(f, tau, a_lo, am, b_lo, bm, child_tol, depth + 1) +
           integrate_adaptive(f, tau, am, a_hi, b_lo, bm, child_tol, depth + 1) +
           integrate_adaptive(f, tau, a_lo, am, bm, b_hi, child_tol, depth + 1) +
           integrate_adaptive(f, tau, am, a_hi, bm, b_hi, child_tol, depth + 1);
}

/// Smooth radial cutoff supported on [0, 1), equal to 1 at 0.
inline double bump(double r2)
{
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
}

} // namespace oracles

#endif
