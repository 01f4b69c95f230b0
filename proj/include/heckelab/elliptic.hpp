#ifndef HECKELAB_ELLIPTIC_HPP
#define HECKELAB_ELLIPTIC_HPP

#include <complex>
#include <memory>
#include <utility>
#include <vector>

namespace heckelab {

using Complex = std::complex<double>;

/// Cell-reduction result: z = z0 + scale*(a + b*tau) with z0 in the half-open
/// fundamental cell of scale*(Z + tau*Z).
struct CellReduction {
    Complex z0;
    long a = 0;
    long b = 0;
};

/// An elliptic curve C/(Z + tau*Z) together with the marked points and the
/// numerical policy (series truncation, tolerances) used by every evaluation
/// on it. Construct through make(); the factory precomputes the theta series
/// coefficients and the Weierstrass data and validates the inputs.
struct CurveParams {
    Complex tau;
    Complex g2;
    Complex g3;
    std::vector<Complex> marked_points; // t0 = 0 first, pairwise distinct mod lattice
    int series_terms = 32;
    double tol = 1e-9;
    double eps_sing = 1e-9;

    static CurveParams make(Complex tau,
                            std::vector<Complex> marked_points = {Complex(0.0, 0.0)},
                            int series_terms = 32,
                            double tol = 1e-9);

    int marked_count() const { return static_cast<int>(marked_points.size()) - 1; }

    // Precomputed per-curve data (filled by make()).
    struct Cache;
    std::shared_ptr<const Cache> cache;
};

/// Odd Jacobi theta with simple zeros on the lattice, fixed here to the
/// classical q-series normalization
///   theta(z) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z),  q = e^{i pi tau}.
/// The argument is reduced to the fundamental cell before summation and the
/// quasi-periodicity factors are multiplied back, so the evaluation is stable
/// for any finite z. All formulas in this project are theta ratios, so the
/// normalization constant cancels everywhere it matters.
Complex theta(Complex z, const CurveParams& curve);

/// theta~(z, a) = theta(z - a) / theta(-a). Throws singular_argument_error if
/// a is within eps_sing of the lattice.
Complex theta_tilde(Complex z, Complex a, const CurveParams& curve);

/// Logarithmic derivative theta'(t)/theta(t), with theta' summed term-wise
/// (no finite differences). Odd, 1-periodic, and drops by 2*pi*i across tau.
Complex theta_log_deriv(Complex t, const CurveParams& curve);

/// (wp(z), wp'(z)) computed from theta ratios:
///   wp = -(log theta)'' + theta'''(0) / (3 theta'(0)),
/// which pins the additive constant per curve; wp' = -(log theta)'''.
std::pair<Complex, Complex> wp_pair(Complex z, const CurveParams& curve);

/// Weierstrass invariants (g2, g3) of Z + tau*Z from the Eisenstein series
/// E4, E6. Throws invalid_input_error when Im tau <= 0.
std::pair<Complex, Complex> invariants_from_tau(Complex tau);

/// A point z in the fundamental cell with wp(z) = c, seeded from a coarse
/// grid of wp values and refined by Newton with wp' as the derivative. The
/// result is defined up to z -> -z; the representative returned is the
/// lexicographically smaller (Re, Im) of the two cell-reduced candidates.
Complex wp_inverse(Complex c, const CurveParams& curve);

/// z = z0 + scale*(a + b*tau) with z0 in the half-open cell
/// { alpha*scale + beta*scale*tau : alpha, beta in [0,1) }.
/// scale must be 1 (full lattice) or 1/2 (the half-lattice of the moduli action).
CellReduction reduce_to_cell(Complex z, const CurveParams& curve, double sublattice_scale = 1.0);

/// Distance from z to the nearest point of scale*(Z + tau*Z).
double lattice_dist(Complex z, const CurveParams& curve, double sublattice_scale = 1.0);

namespace detail {
/// theta and its first three derivatives at a cell-reduced argument.
struct ThetaDerivs {
    Complex t0, t1, t2, t3;
};
ThetaDerivs theta_derivs(Complex z_reduced, const CurveParams& curve, int max_order);
} // namespace detail

} // namespace heckelab

#endif
