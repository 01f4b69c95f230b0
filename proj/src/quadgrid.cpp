#include "heckelab/operator.hpp"
#include "heckelab/errors.hpp"

namespace heckelab {

double QuadGrid::total_area() const
{
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

QuadGrid build_grid(int N, const CurveParams& curve)
{
    if (N < 8) {
        throw invalid_input_error("build_grid: N must be at least 8");
    }
    QuadGrid grid;
    grid.N = N;
    grid.tau = curve.tau;
    grid.edge_a = Complex(0.5 / N, 0.0);
    grid.edge_b = curve.tau * (0.25 / N);
    const double cell_area = (0.5 / N) * (0.25 / N) * curve.tau.imag();
    grid.nodes.reserve(static_cast<std::size_t>(N) * N);
    grid.weights.assign(static_cast<std::size_t>(N) * N, cell_area);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const double a = (i + 0.5) * 0.5 / N;
            const double b = (j + 0.5) * 0.25 / N;
            grid.nodes.push_back(a + b * curve.tau);
        }
    }
    return grid;
}

PlanarGrid to_plane(const QuadGrid& grid, const CurveParams& curve)
{
    PlanarGrid plane;
    plane.source = grid;
    plane.r.reserve(grid.nodes.size());
    plane.wp_prime.reserve(grid.nodes.size());
    plane.weights.reserve(grid.nodes.size());
    plane.r_shift.reserve(grid.nodes.size());
    plane.jac_shift.reserve(grid.nodes.size());
    const Complex shifts[4] = {Complex(0.0, 0.0), Complex(0.5, 0.0), 0.5 * curve.tau,
                               Complex(0.5, 0.0) + 0.5 * curve.tau};
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        const auto [wp, wpd] = wp_pair(grid.nodes[k], curve);
        plane.r.push_back(wp);
        plane.wp_prime.push_back(wpd);
        plane.weights.push_back(grid.weights[k] * std::norm(wpd));
        std::array<Complex, 4> rs;
        std::array<double, 4> js;
        for (int t = 0; t < 4; ++t) {
            const auto [wps, wpds] = wp_pair(grid.nodes[k] + shifts[t], curve);
            rs[static_cast<std::size_t>(t)] = wps;
            js[static_cast<std::size_t>(t)] = std::abs(wpds);
        }
        plane.r_shift.push_back(rs);
        plane.jac_shift.push_back(js);
    }
    return plane;
}

} // namespace heckelab
