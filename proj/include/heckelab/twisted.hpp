#ifndef HECKELAB_TWISTED_HPP
#define HECKELAB_TWISTED_HPP

#include "heckelab/operator.hpp"

namespace heckelab {

/// Quadrature grid on the projective line: stereographic image of a uniform
/// midpoint grid on the sphere, with plane-Lebesgue area weights. Fields on
/// the grid are stored row-major in the polar index (theta-major).
struct SphereGrid {
    int n_theta = 0;
    int n_phi = 0;
    std::vector<Complex> y;
    std::vector<double> w;

    int size() const { return n_theta * n_phi; }
    int index(int j, int k) const { return j * n_phi + k; }

    /// Bilinear interpolation in the (theta, phi) chart, phi wrapping,
    /// theta clamped to the node range.
    double interpolate(const std::vector<double>& field, int field_offset, Complex y_point) const;
};

/// M is rounded down to the nearest square.
SphereGrid build_sphere_grid(int M);

/// One application of the twisted (m = 1) Hecke operator to samples
/// f(q_j, y_k), stored as f[j * sgrid.size() + k]:
///   (H f)(p_i, y) = sum_j H0[i][j] * f(q_j, g^-1 y) * |d(g^-1 y)/dy|,
/// with g = line_transport(x, p_i, q_j, t1) and H0 the m = 0 assembly on the
/// same grid (kernel value times weight, singular cells integrated). The
/// derivative modulus makes the point action unitary on half-densities;
/// resampling is bilinear on the sphere grid.
struct TwistedApplyResult {
    std::vector<double> values;
    bool interp_warning = false; // Mobius displacement large for this grid
};

TwistedApplyResult apply_m1(Complex x, const QuadGrid& grid, const SphereGrid& sgrid,
                            const std::vector<double>& f, Complex t1,
                            const CurveParams& curve, const OperatorMatrix& H0);

/// Weighted L2 pairing sum_{j,k} w_j w~_k a(j,k) b(j,k) on grid x sphere-grid.
double twisted_inner(const QuadGrid& grid, const SphereGrid& sgrid,
                     const std::vector<double>& a, const std::vector<double>& b);

} // namespace heckelab

#endif
