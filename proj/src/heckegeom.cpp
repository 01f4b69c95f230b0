#include "heckelab/heckegeom.hpp"
#include "heckelab/errors.hpp"

#include <cmath>
#include <numbers>

namespace heckelab {

namespace {

constexpr double eps_line = 1e-7;

double min_pole_dist(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    return std::min(lattice_dist(q - (x + p), curve), lattice_dist(q + (x + p), curve));
}

} // namespace

ProjectivePoint MobiusMap::apply(const ProjectivePoint& y) const
{
    return ProjectivePoint(a * y.u() + b * y.w(), c * y.u() + d * y.w());
}

double MobiusMap::frobenius() const
{
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
}

MobiusMap MobiusMap::unit_normalized() const
{
    const double f = frobenius();
    if (!(f > 0.0) || !std::isfinite(f)) {
        throw invalid_input_error("MobiusMap: cannot normalize a zero or non-finite map");
    }
    return {a / f, b / f, c / f, d / f};
}

MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2)
{
    return {m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
            m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d};
}

double pgl_distance(const MobiusMap& m1, const MobiusMap& m2)
{
    const MobiusMap n1 = m1.unit_normalized();
    const MobiusMap n2 = m2.unit_normalized();
    // Residual against the best scalar multiple, computed by direct
    // subtraction so that tiny distances are not lost to cancellation.
    const Complex lam = std::conj(n2.a) * n1.a + std::conj(n2.b) * n1.b +
                        std::conj(n2.c) * n1.c + std::conj(n2.d) * n1.d;
    const Complex ra = n1.a - lam * n2.a;
    const Complex rb = n1.b - lam * n2.b;
    const Complex rc = n1.c - lam * n2.c;
    const Complex rd = n1.d - lam * n2.d;
    return std::sqrt(std::norm(ra) + std::norm(rb) + std::norm(rc) + std::norm(rd));
}

std::array<Complex, 2> MeasureData::roots() const
{
    const Complex a = P_coeffs[2], b = P_coeffs[1], c = P_coeffs[0];
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    // Stable quadratic roots (avoid cancellation in the small root).
    const Complex qform = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
    return {qform / a, c / qform};
}

Complex cross_ratio(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    const double d = min_pole_dist(p, q, x, curve);
    if (d < curve.eps_sing) {
        throw singular_argument_error("cross_ratio: q at a pole of the modification function", d);
    }
    return theta(p + q - x, curve) * theta(q + x - p, curve) /
           (theta(q - x - p, curve) * theta(q + x + p, curve));
}

Complex cross_ratio_log_dq(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    return theta_log_deriv(p + q - x, curve) + theta_log_deriv(q + x - p, curve) -
           theta_log_deriv(q - x - p, curve) - theta_log_deriv(q + x + p, curve);
}

Complex cross_ratio_log_dp(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    return theta_log_deriv(p + q - x, curve) - theta_log_deriv(q + x - p, curve) +
           theta_log_deriv(q - x - p, curve) - theta_log_deriv(q + x + p, curve);
}

Complex qp_derivative(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    // q'_p = -f'_p / f'_q; the common factor f cancels in the log forms.
    return -cross_ratio_log_dp(p, q, x, curve) / cross_ratio_log_dq(p, q, x, curve);
}

HeckeSolve solve_modification(Complex p, Complex x, const ProjectivePoint& s,
                              const CurveParams& curve)
{
    if (s.distance(ProjectivePoint::affine(Complex(0.0, 0.0))) < eps_line ||
        s.distance(ProjectivePoint::infinity()) < eps_line) {
        throw degenerate_configuration_error(
            "solve_modification: line parameter at 0 or infinity hits the singular divisor");
    }
    const Complex sv = s.value();

    const Complex thpmx = theta(p - x, curve);
    const Complex thppx = theta(p + x, curve);
    if (std::abs(thppx) == 0.0 || std::abs(thpmx) == 0.0) {
        throw degenerate_configuration_error("solve_modification: p +- x on the lattice");
    }
    const Complex c0 = (thpmx * thpmx) / (thppx * thppx);
    const Complex wp_xmp = wp_pair(x - p, curve).first;
    const Complex wp_xpp = wp_pair(x + p, curve).first;

    const Complex denom = c0 - sv;
    Complex q;
    Complex wp_q;
    if (std::abs(denom) < 1e-13 * std::max(1.0, std::abs(c0))) {
        // f(p, 0, x) = c0: the root collides with the lattice; wp diverges.
        throw degenerate_configuration_error(
            "solve_modification: s equals the central value, q degenerates to the lattice");
    }
    wp_q = (c0 * wp_xmp - sv * wp_xpp) / denom;
    q = wp_inverse(wp_q, curve);

    HeckeSolve out;
    out.q = q;
    out.r1 = x + q;
    out.r2 = x - q;
    out.s = s;
    out.wp_q = wp_q;
    out.c = theta(out.r1 - 2.0 * x + p, curve) / theta(out.r1 - 2.0 * x - p, curve);
    out.residual = std::abs(cross_ratio(p, q, x, curve) - sv);

    const double scale = std::max(1.0, std::abs(sv));
    if (out.residual > 1e4 * curve.tol * scale) {
        throw inconsistency_error("solve_modification: recovered root fails f(p,q,x)=s");
    }
    return out;
}

MobiusMap line_transport(Complex x, Complex p, Complex q, Complex t, const CurveParams& curve)
{
    const Complex a1 = -p + x + q;
    const Complex a2 = p + x + q;
    const Complex a3 = -p + x - q;
    const Complex a4 = p + x - q;
    for (Complex a : {a1, a2, a3, a4}) {
        const double d = lattice_dist(a, curve);
        if (d < curve.eps_sing) {
            throw degenerate_configuration_error(
                "line_transport: theta~ pole, configuration on the excluded divisor");
        }
    }
    return MobiusMap{theta_tilde(t, a1, curve), -theta_tilde(t, a2, curve),
                     theta_tilde(t, a3, curve), -theta_tilde(t, a4, curve)};
}

std::pair<ModuliPoint, HeckeSolve> hecke_transform(const ModuliPoint& pt, Complex x,
                                                   const ProjectivePoint& s,
                                                   const CurveParams& curve)
{
    const HeckeSolve solve = solve_modification(pt.p, x, s, curve);
    ModuliPoint image;
    image.p = solve.q;
    image.y.reserve(pt.y.size());
    for (std::size_t i = 0; i < pt.y.size(); ++i) {
        const MobiusMap g = line_transport(x, pt.p, solve.q, curve.marked_points[i + 1], curve);
        image.y.push_back(g.apply(pt.y[i]));
    }
    auto [canonical, g_applied] = canonicalize(image, curve);
    (void)g_applied;
    return {canonical, solve};
}

MeasureData measure_polynomial(Complex p, Complex x, const CurveParams& curve)
{
    // Deterministic generic sample points in q.
    std::array<Complex, 8> qs;
    for (int k = 0; k < 8; ++k) {
        qs[static_cast<std::size_t>(k)] =
            (0.131 + 0.0789 * k) + (0.177 + 0.0831 * k) * curve.tau * 0.5;
    }

    std::array<Complex, 8> fv, fp;
    for (int k = 0; k < 8; ++k) {
        const Complex q = qs[static_cast<std::size_t>(k)];
        if (min_pole_dist(p, q, x, curve) < 1e-3) {
            // Nudge away from the pole divisor; the fit only needs generic points.
            qs[static_cast<std::size_t>(k)] += 0.041 + 0.029 * curve.tau;
        }
        const Complex qk = qs[static_cast<std::size_t>(k)];
        const Complex f = cross_ratio(p, qk, x, curve);
        fv[static_cast<std::size_t>(k)] = f;
        fp[static_cast<std::size_t>(k)] = f * cross_ratio_log_dp(p, qk, x, curve);
    }

    // 3x3 Vandermonde solve for P(v) = c0 + c1 v + c2 v^2 through the first
    // three samples, by Cramer's rule.
    const Complex v0 = fv[0], v1 = fv[1], v2 = fv[2];
    const Complex det = (v1 - v0) * (v2 - v0) * (v2 - v1);
    const double vscale = std::max({std::abs(v0), std::abs(v1), std::abs(v2), 1.0});
    if (std::abs(det) < 1e-10 * vscale * vscale * vscale) {
        throw inconsistency_error(
            "measure_polynomial: sample values nearly coincide (degenerate p, x)");
    }
    // Lagrange form of the interpolating quadratic.
    const Complex w0 = fp[0] / ((v0 - v1) * (v0 - v2));
    const Complex w1 = fp[1] / ((v1 - v0) * (v1 - v2));
    const Complex w2 = fp[2] / ((v2 - v0) * (v2 - v1));
    MeasureData out;
    out.P_coeffs[2] = w0 + w1 + w2;
    out.P_coeffs[1] = -(w0 * (v1 + v2) + w1 * (v0 + v2) + w2 * (v0 + v1));
    out.P_coeffs[0] = w0 * v1 * v2 + w1 * v0 * v2 + w2 * v0 * v1;

    double resid = 0.0;
    for (int k = 3; k < 8; ++k) {
        const std::size_t i = static_cast<std::size_t>(k);
        const double scale = std::max(1.0, std::abs(fp[i]));
        resid = std::max(resid, std::abs(out.eval(fv[i]) - fp[i]) / scale);
    }
    out.fit_residual = resid;
    if (resid >= curve.tol) {
        throw inconsistency_error("measure_polynomial: over-determined fit residual too large");
    }

    out.q_ref = qs[0];
    out.L = determinant_factor(p, qs[0], x, curve);
    out.qp_deriv = qp_derivative(p, qs[0], x, curve);
    return out;
}

Complex determinant_factor(Complex p, Complex q, Complex x, const CurveParams& curve)
{
    const Complex d1 = theta(p - x - q, curve);
    const Complex d2 = theta(q - x - p, curve);
    const Complex d3 = theta(p + q + x, curve);
    const Complex d4 = theta(p + q - x, curve);
    const double dmin = std::min({std::abs(d1), std::abs(d2), std::abs(d3), std::abs(d4)});
    if (dmin == 0.0) {
        throw singular_argument_error("determinant_factor: denominator theta vanishes", 0.0);
    }
    return -theta(2.0 * p, curve) * theta(2.0 * q, curve) / (d1 * d2 * d3 * d4);
}

} // namespace heckelab
