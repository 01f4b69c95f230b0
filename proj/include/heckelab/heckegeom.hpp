#ifndef HECKELAB_HECKEGEOM_HPP
#define HECKELAB_HECKEGEOM_HPP

#include "heckelab/elliptic.hpp"
#include "heckelab/moduli.hpp"

#include <array>

namespace heckelab {

/// A projective-linear map (A y + B) / (C y + D), stored modulo a global
/// scalar. The determinant is meaningful after unit normalization.
struct MobiusMap {
    Complex a, b, c, d;

    ProjectivePoint apply(const ProjectivePoint& y) const;
    Complex apply_affine(Complex y) const { return (a * y + b) / (c * y + d); }
    MobiusMap inverse() const { return {d, -b, -c, a}; }
    Complex det() const { return a * d - b * c; }
    double frobenius() const;
    /// Scaled to unit Frobenius norm (phase left free).
    MobiusMap unit_normalized() const;
};

MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2);

/// Distance between projective classes: sqrt(1 - |<m1, m2>|^2) for
/// unit-normalized representatives. Zero iff equal in PGL2.
double pgl_distance(const MobiusMap& m1, const MobiusMap& m2);

/// Solved Hecke-modification data at modification point 2x (the half x is
/// what all interfaces carry). q is the elliptic parameter of the modified
/// bundle, r1 = x + q and r2 = x - q are the section roots, c is the residue
/// ratio of the section normalization, s echoes the line parameter.
struct HeckeSolve {
    Complex q;
    Complex r1, r2;
    Complex c;
    ProjectivePoint s;
    Complex wp_q;
    double residual = 0.0; // |f(p,q,x) - s| of the returned root
};

/// Quadratic P with f'_p = P(f) as functions of q, fitted at three generic
/// points and validated at five more; the l_factor and qp_deriv fields are
/// evaluated at the reference point q_ref used in the fit.
struct MeasureData {
    std::array<Complex, 3> P_coeffs; // P(v) = P_coeffs[0] + P_coeffs[1] v + P_coeffs[2] v^2
    double fit_residual = 0.0;
    Complex q_ref;
    Complex L;        // determinant factor L(p, q_ref, x)
    Complex qp_deriv; // q'_p = -f'_p / f'_q at q_ref

    Complex eval(Complex v) const { return P_coeffs[0] + v * (P_coeffs[1] + v * P_coeffs[2]); }
    std::array<Complex, 2> roots() const;
};

/// The degree-two elliptic function whose level sets define the modification:
///   f(p, q, x) = theta(p+q-x) theta(q+x-p) / (theta(q-x-p) theta(q+x+p)).
/// Even and elliptic in q, with simple poles at q = +-(x+p).
Complex cross_ratio(Complex p, Complex q, Complex x, const CurveParams& curve);

/// d/dq log f as the four-term sum of theta log-derivatives; odd in q.
Complex cross_ratio_log_dq(Complex p, Complex q, Complex x, const CurveParams& curve);

/// d/dp log f (same structure with the roles of the two middle terms swapped).
Complex cross_ratio_log_dp(Complex p, Complex q, Complex x, const CurveParams& curve);

/// q'_p = -f'_p / f'_q at the configuration (p, q, x).
Complex qp_derivative(Complex p, Complex q, Complex x, const CurveParams& curve);

/// Solve f(p, q, x) = s for q through the linear-fractional reduction
///   f = c0 (wp(q) - wp(x-p)) / (wp(q) - wp(x+p)),  c0 = theta(p-x)^2 / theta(p+x)^2,
/// then invert wp. Returns the canonical representative of the root pair +-q.
/// s at distance < eps_line from 0 or infinity is a degenerate line.
HeckeSolve solve_modification(Complex p, Complex x, const ProjectivePoint& s,
                              const CurveParams& curve);

/// The projective map carrying the parabolic value at marked point t through
/// the modification p -> q at 2x:
///   [ theta~(t,-p+x+q)  -theta~(t,p+x+q) ]
///   [ theta~(t,-p+x-q)  -theta~(t,p+x-q) ].
MobiusMap line_transport(Complex x, Complex p, Complex q, Complex t, const CurveParams& curve);

/// Full modification map on moduli coordinates: solve for q and transport
/// every parabolic value; the result is canonicalized.
std::pair<ModuliPoint, HeckeSolve> hecke_transform(const ModuliPoint& pt, Complex x,
                                                   const ProjectivePoint& s,
                                                   const CurveParams& curve);

/// Fit the quadratic P with f'_p = P(f) (in q) by a three-point linear solve,
/// validated at five extra points. Throws inconsistency_error when the
/// configuration is degenerate (e.g. x near 0 makes f constant).
MeasureData measure_polynomial(Complex p, Complex x, const CurveParams& curve);

/// L(p,q,x) = -theta(2p) theta(2q) /
///            (theta(p-x-q) theta(q-x-p) theta(p+q+x) theta(p+q-x));
/// satisfies det(line_transport) = L * theta(t) theta(t-2x) for every t.
Complex determinant_factor(Complex p, Complex q, Complex x, const CurveParams& curve);

} // namespace heckelab

#endif
