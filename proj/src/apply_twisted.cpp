#include "heckelab/twisted.hpp"
#include "heckelab/errors.hpp"
#include "heckelab/heckegeom.hpp"

#include <cmath>
#include <numbers>

namespace heckelab {

namespace {
constexpr double pi = std::numbers::pi;
}

SphereGrid build_sphere_grid(int M)
{
    const int n = std::max(4, static_cast<int>(std::sqrt(static_cast<double>(M))));
    SphereGrid g;
    g.n_theta = n;
    g.n_phi = n;
    g.y.reserve(static_cast<std::size_t>(n) * n);
    g.w.reserve(static_cast<std::size_t>(n) * n);
    const double dth = pi / n;
    const double dph = 2.0 * pi / n;
    for (int j = 0; j < n; ++j) {
        const double th = (j + 0.5) * dth;
        const double r = std::tan(0.5 * th);
        const double sec = 1.0 / std::cos(0.5 * th);
        // Plane Lebesgue area element r dr dphi in polar angles.
        const double w = r * 0.5 * sec * sec * dth * dph;
        for (int k = 0; k < n; ++k) {
            const double ph = k * dph;
            g.y.push_back(Complex(r * std::cos(ph), r * std::sin(ph)));
            g.w.push_back(w);
        }
    }
    return g;
}

namespace {

// Catmull-Rom weights for the interval between the middle two of four nodes.
inline void catmull_rom(double t, double w[4])
{
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t + 2.0 * t2 - t3);
    w[1] = 0.5 * (2.0 - 5.0 * t2 + 3.0 * t3);
    w[2] = 0.5 * (t + 4.0 * t2 - 3.0 * t3);
    w[3] = 0.5 * (-t2 + t3);
}

} // namespace

double SphereGrid::interpolate(const std::vector<double>& field, int field_offset,
                               Complex y_point) const
{
    const double r = std::abs(y_point);
    const double th = 2.0 * std::atan(r);
    double ph = std::arg(y_point);
    if (ph < 0.0) ph += 2.0 * pi;

    const double dth = pi / n_theta;
    const double dph = 2.0 * pi / n_phi;
    // Bicubic stencil: periodic wrap in phi, clamped rows in theta. Samples
    // are rescaled by 1 + |y|^2 before interpolation: a smooth half-density
    // in the plane trivialization becomes a smooth function on the sphere,
    // so the stencil stays accurate at the poles and in the far zone.
    double tj = std::clamp(th / dth - 0.5, 0.0, static_cast<double>(n_theta - 1));
    const int j1 = std::min(n_theta - 2, static_cast<int>(tj));
    const double fj = tj - j1;
    const double tk = ph / dph;
    const int k1 = static_cast<int>(tk) % n_phi;
    const double fk = tk - std::floor(tk);

    double wj[4], wk[4];
    catmull_rom(fj, wj);
    catmull_rom(fk, wk);

    double total = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int j = std::clamp(j1 - 1 + a, 0, n_theta - 1);
        const double tr = std::tan(0.5 * (j + 0.5) * dth);
        const double row_scale = 1.0 + tr * tr;
        double row = 0.0;
        for (int b = 0; b < 4; ++b) {
            const int k = (k1 - 1 + b + n_phi) % n_phi;
            row += wk[b] * field[static_cast<std::size_t>(field_offset + index(j, k))];
        }
        total += wj[a] * row * row_scale;
    }
    const double r2 = r * r;
    if (!std::isfinite(r2)) return 0.0;
    return total / (1.0 + r2);
}

TwistedApplyResult apply_m1(Complex x, const QuadGrid& grid, const SphereGrid& sgrid,
                            const std::vector<double>& f, Complex t1,
                            const CurveParams& curve, const OperatorMatrix& H0)
{
    const int nq = static_cast<int>(grid.nodes.size());
    const int ny = sgrid.size();
    if (static_cast<int>(f.size()) != nq * ny) {
        throw invalid_input_error("apply_m1: sample vector has wrong length");
    }
    if (H0.H.rows() != nq || H0.kind != "m0") {
        throw invalid_input_error("apply_m1: H0 must be the m0 assembly on the same grid");
    }

    TwistedApplyResult out;
    out.values.assign(static_cast<std::size_t>(nq) * ny, 0.0);
    const double cell_angle = pi / sgrid.n_theta;

    for (int i = 0; i < nq; ++i) {
        const Complex p = grid.nodes[static_cast<std::size_t>(i)];
        for (int j = 0; j < nq; ++j) {
            const double hij = H0.H(i, j);
            if (hij == 0.0) continue;
            MobiusMap g;
            try {
                g = line_transport(x, p, grid.nodes[static_cast<std::size_t>(j)], t1, curve);
            } catch (const degenerate_configuration_error&) {
                continue; // excluded-divisor pair; measure-zero contribution
            }
            const MobiusMap gi = g.inverse();
            const Complex det = gi.det();
            // Distortion heuristic: a Mobius map with conditioning much larger
            // than the angular resolution will alias on this grid.
            const double cond = (std::norm(gi.a) + std::norm(gi.b) + std::norm(gi.c) +
                                 std::norm(gi.d)) / std::abs(det);
            if (cond * cell_angle > 40.0) out.interp_warning = true;
            for (int k = 0; k < ny; ++k) {
                const Complex y = sgrid.y[static_cast<std::size_t>(k)];
                const Complex denom = gi.c * y + gi.d;
                const Complex gy = (gi.a * y + gi.b) / denom;
                const double deriv = std::abs(det) / std::norm(denom);
                const double fv = sgrid.interpolate(f, j * ny, gy);
                out.values[static_cast<std::size_t>(i * ny + k)] += hij * fv * deriv;
            }
        }
    }
    return out;
}

double twisted_inner(const QuadGrid& grid, const SphereGrid& sgrid,
                     const std::vector<double>& a, const std::vector<double>& b)
{
    const int nq = static_cast<int>(grid.nodes.size());
    const int ny = sgrid.size();
    double total = 0.0;
    for (int j = 0; j < nq; ++j) {
        double inner = 0.0;
        for (int k = 0; k < ny; ++k) {
            const std::size_t idx = static_cast<std::size_t>(j * ny + k);
            inner += sgrid.w[static_cast<std::size_t>(k)] * a[idx] * b[idx];
        }
        total += grid.weights[static_cast<std::size_t>(j)] * inner;
    }
    return total;
}

} // namespace heckelab
