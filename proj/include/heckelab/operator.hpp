#ifndef HECKELAB_OPERATOR_HPP
#define HECKELAB_OPERATOR_HPP

#include "heckelab/elliptic.hpp"
#include "heckelab/kernel.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace heckelab {

/// Midpoint quadrature grid on the fundamental domain of the even moduli
/// space for m = 0: the half-cell of the half-lattice intersected with a
/// fixed fundamental half for the +- identification,
///   { a + b*tau : a in [0,1/2), b in [0,1/4) },
/// N x N cells, midpoint nodes, weights equal to cell areas. Total weight is
/// Im(tau)/8. Nodes flagged in `excluded` carry zero weight in assemblies.
struct QuadGrid {
    int N = 0;
    Complex tau;
    std::vector<Complex> nodes;
    std::vector<double> weights;
    std::vector<int> excluded;
    Complex edge_a; // cell edge along 1:  1/(2N)
    Complex edge_b; // cell edge along tau: tau/(4N)

    double cell_diameter() const { return std::abs(edge_a) + std::abs(edge_b); }
    double total_area() const;
};

QuadGrid build_grid(int N, const CurveParams& curve);

/// The image of a torus grid in the Weierstrass plane: r_i = wp(node_i),
/// weights scaled by the area Jacobian |wp'|^2. Also carries the images of
/// the four half-period translates of every node (the quotient kernel sums
/// over them) and the source grid so singular cells can be integrated by
/// pullback.
struct PlanarGrid {
    QuadGrid source;
    std::vector<Complex> r;
    std::vector<Complex> wp_prime;
    std::vector<double> weights;
    std::vector<std::array<Complex, 4>> r_shift;
    std::vector<std::array<double, 4>> jac_shift; // |wp'(node + h)|
};

PlanarGrid to_plane(const QuadGrid& grid, const CurveParams& curve);

/// Dense Nystrom matrix of a discretized Hecke operator.
struct OperatorMatrix {
    Eigen::MatrixXd H;
    Complex x;
    Complex tau;
    int N = 0;
    std::string kind; // "m0" (torus) or "p1" (plane pushforward)
    bool symmetrized = false;
    double selfadjoint_defect = 0.0; // ||H - H^T||_F / ||H||_F before symmetrization
};

/// Torus assembly for m = 0: H[i][j] = K_sym(p_i, q_j, x) w_j with
/// K_sym(p,q,x) = K(p,q,x) + K(p,-q,x) (functions even under q -> -q on the
/// quotient). Cells within one cell-diameter of the singular divisor
/// q in {+-p +-x} are integrated by an 8x8 polar (Duffy) sub-quadrature
/// around the singular point. Deterministic for any thread count: every
/// entry is computed independently in a fixed summation order.
OperatorMatrix assemble_m0(Complex x, const QuadGrid& grid, const CurveParams& curve,
                           bool symmetrize = true);

/// Plane assembly over the wp-image grid, used as the unitary-equivalence
/// oracle: entries 2 K_p1(r_i, r_j, wp(x)) w~_j; the factor two is the same
/// evenization carried through the two-to-one pushforward, so the m0 and p1
/// matrices discretize the same operator. Singular cells are integrated by
/// pullback with the same polar scheme.
OperatorMatrix assemble_p1(Complex x, const PlanarGrid& plane, const CurveParams& curve,
                           bool symmetrize = true);

/// Validated Hecke point: throws degenerate_configuration_error when x is
/// within tolerance of a half-period or a marked point.
void require_generic_hecke_point(Complex x, const CurveParams& curve);

struct SpectralReport {
    std::vector<double> eigenvalues;   // sorted descending by |value|
    std::vector<double> decay_profile; // |eigenvalues|, descending
    double selfadjoint_defect = 0.0;
};

/// Full symmetric eigendecomposition (eigenvalues only). Requires a
/// symmetrized matrix.
SpectralReport spectrum(const OperatorMatrix& H);

/// || Hx Hy - Hy Hx ||_F / (||Hx||_F ||Hy||_F); both on the same grid.
double commutator_defect(const OperatorMatrix& Hx, const OperatorMatrix& Hy);

/// Bit-exact operator cache: magic "EHK1", u32 little-endian node count,
/// node-count^2 IEEE-754 little-endian doubles row-major, then a
/// structured-text metadata footer.
void save_operator(const std::string& path, const OperatorMatrix& H);

/// Loads a cached operator; returns false when the file is absent. Throws
/// invalid_input_error on a malformed file. metadata_matches reports whether
/// the footer agrees with what save_operator would write for `expected`.
bool load_operator(const std::string& path, OperatorMatrix& out);
bool metadata_matches(const OperatorMatrix& a, const OperatorMatrix& b);

/// Version string written into cache footers and reports.
const char* version_string();

} // namespace heckelab

#endif
