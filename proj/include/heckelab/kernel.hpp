#ifndef HECKELAB_KERNEL_HPP
#define HECKELAB_KERNEL_HPP

#include "heckelab/elliptic.hpp"

namespace heckelab {

/// Kernel density at (p, q, x) together with the distance from q to the
/// singular divisor {+-p +-x} (lattice-reduced). The value is finite iff the
/// distance is positive.
struct KernelValue {
    double value = 0.0;
    double dist_to_singular = 0.0;
};

/// The symmetric quartic
///   Q(r,s,t) = r^2 s^2 + r^2 t^2 + s^2 t^2 - 2 r s t (r+s+t)
///            + (g2/2)(rs + st + rt) + g3 (r+s+t) + g2^2/16,
/// exactly permutation-symmetric as written.
Complex symmetric_quartic(Complex r, Complex s, Complex t, const CurveParams& curve);

/// Distance from q to the nearest lattice translate of {p+x, p-x, -p+x, -p-x}.
double singular_distance(Complex p, Complex q, Complex x, const CurveParams& curve);

/// Nearest singular point as a concrete complex position close to q,
/// together with the distance (used by the singular-cell quadrature).
std::pair<Complex, double> nearest_singular_point(Complex p, Complex q, Complex x,
                                                  const CurveParams& curve);

/// Hecke measure density on the torus against Lebesgue measure dq dq~:
///   K(p,q,x) = | Z(p+q-x) + Z(q+x-p) - Z(q-x-p) - Z(q+x+p) |,
/// where Z is the theta log-derivative. Fully symmetric in (p,q,x), with
/// simple-pole growth 1/|q - q0| at the singular divisor.
KernelValue kernel_torus(Complex p, Complex q, Complex x, const CurveParams& curve);

/// Plane form of the kernel in Weierstrass coordinates:
///   K_p1(r,s,t) = |4 t^3 - g2 t - g3|^{1/2} / |Q(r,s,t)|,
/// the density that matches kernel_torus under the half-density pushforward
/// along wp: K_p1(wp p, wp q, wp x) |wp'(p) wp'(q)| = K(p,q,x).
double kernel_plane(Complex r, Complex s, Complex t, const CurveParams& curve);

} // namespace heckelab

#endif
