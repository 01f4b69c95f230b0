#include "heckelab/kernel.hpp"
#include "heckelab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace heckelab {

Complex symmetric_quartic(Complex r, Complex s, Complex t, const CurveParams& curve)
{
    // Sort the arguments so the summation order (and hence the rounding) is
    // identical for every permutation: the symmetry holds bit-for-bit.
    const auto less = [](Complex a, Complex b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    };
    if (less(s, r)) std::swap(r, s);
    if (less(t, s)) std::swap(s, t);
    if (less(s, r)) std::swap(r, s);

    const Complex g2 = curve.g2;
    const Complex g3 = curve.g3;
    const Complex rs = r * s, st = s * t, rt = r * t;
    return rs * rs + rt * rt + st * st - 2.0 * (rs * t) * (r + s + t) +
           0.5 * g2 * (rs + st + rt) + g3 * (r + s + t) + g2 * g2 / 16.0;
}

double singular_distance(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    return nearest_singular_point(p, q, x, curve).second;
}

std::pair<Complex, double> nearest_singular_point(Complex p, Complex q, Complex x,
                                                  const CurveParams& curve)
{
    const Complex pts[4] = {p + x, p - x, -p + x, -p - x};
    Complex best_point = pts[0];
    double best = std::numeric_limits<double>::max();
    for (const Complex s : pts) {
        // Nearest lattice translate of s to q.
        const auto red = reduce_to_cell(q - s, curve);
        const Complex base = s + (static_cast<double>(red.a) + static_cast<double>(red.b) * curve.tau);
        for (long da = -1; da <= 1; ++da) {
            for (long db = -1; db <= 1; ++db) {
                const Complex cand =
                    base + (static_cast<double>(da) + static_cast<double>(db) * curve.tau);
                const double d = std::abs(q - cand);
                if (d < best) {
                    best = d;
                    best_point = cand;
                }
            }
        }
    }
    return {best_point, best};
}

KernelValue kernel_torus(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    KernelValue out;
    out.dist_to_singular = singular_distance(p, q, x, curve);
    if (out.dist_to_singular < curve.eps_sing) {
        throw singular_argument_error("kernel_torus: q on the singular divisor",
                                      out.dist_to_singular);
    }
    const Complex zsum = theta_log_deriv(p + q - x, curve) + theta_log_deriv(q + x - p, curve) -
                         theta_log_deriv(q - x - p, curve) - theta_log_deriv(q + x + p, curve);
    out.value = std::abs(zsum);
    return out;
}

double kernel_plane(Complex r, Complex s, Complex t, const CurveParams& curve)
{
    const Complex quartic = symmetric_quartic(r, s, t, curve);
    const double qmag = std::abs(quartic);
    const double scale = std::max({1.0, std::norm(r), std::norm(s), std::norm(t)});
    if (qmag < curve.eps_sing * scale * scale) {
        throw singular_argument_error("kernel_plane: quartic vanishes (singular divisor)", qmag);
    }
    const Complex cubic = 4.0 * t * t * t - curve.g2 * t - curve.g3;
    return std::sqrt(std::abs(cubic)) / qmag;
}

} // namespace heckelab
