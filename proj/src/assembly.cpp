#include "heckelab/operator.hpp"
#include "heckelab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace heckelab {

namespace {

// 8-point Gauss-Legendre rule on [0,1].
constexpr int gl_n = 8;
constexpr double gl_x[gl_n] = {
    0.01985507175123188, 0.10166676129318664, 0.2372337950418355, 0.40828267875217505,
    0.59171732124782495, 0.7627662049581645,  0.89833323870681336, 0.98014492824876812};
constexpr double gl_w[gl_n] = {
    0.05061426814518813, 0.11119051722668724, 0.15685332293894364, 0.18134189168918099,
    0.18134189168918099, 0.15685332293894364, 0.11119051722668724, 0.05061426814518813};

void parallel_rows(int n, const std::function<void(int)>& fn)
{
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const int n_threads = static_cast<int>(std::min<unsigned>(hw, 16));
    if (n_threads <= 1 || n < 2 * n_threads) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < n_threads; ++t) {
        const int lo = static_cast<int>(static_cast<long>(n) * t / n_threads);
        const int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / n_threads);
        pool.emplace_back([lo, hi, &fn, &error, &error_mutex]() {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Signed polar-fan integral of F over the parallelogram cell centered at c
// with edge vectors ea, eb, taking the singular point q0 as origin. Each of
// the four boundary triangles is mapped by q = q0 + s((1-t)e1 + t e2); the
// Jacobian s regularizes the 1/|q - q0| singularity. Fixed summation order.
template <typename F>
double fan_integral(Complex c, Complex ea, Complex eb, Complex q0, const F& f)
{
    const Complex corners[4] = {c - 0.5 * (ea + eb), c + 0.5 * (ea - eb),
                                c + 0.5 * (ea + eb), c - 0.5 * (ea - eb)};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const Complex e1 = corners[e] - q0;
        const Complex e2 = corners[(e + 1) % 4] - q0;
        const double cross = e1.real() * e2.imag() - e1.imag() * e2.real();
        if (cross == 0.0) continue;
        double acc = 0.0;
        for (int is = 0; is < gl_n; ++is) {
            const double s = gl_x[is];
            double inner = 0.0;
            for (int it = 0; it < gl_n; ++it) {
                const double t = gl_x[it];
                const Complex q = q0 + s * ((1.0 - t) * e1 + t * e2);
                inner += gl_w[it] * f(q);
            }
            acc += gl_w[is] * s * inner;
        }
        total += cross * acc;
    }
    return total;
}

// Half-lattice translates of the four singular base points that can flag any
// cell of the grid domain (the quotient kernel sums over the half-period
// shifts, so its divisor is {+-p +-x} + Lambda/2); everything farther than
// `margin` from the domain's bounding box is dropped.
std::vector<Complex> nearby_singular_points(Complex p, Complex x,
                                            const CurveParams& curve, double margin)
{
    const Complex base[4] = {p + x, p - x, -p + x, -p - x};
    std::vector<Complex> out;
    const double im_tau = curve.tau.imag();
    for (const Complex s : base) {
        const auto red = reduce_to_cell(s, curve, 0.5);
        for (long da = -1; da <= 2; ++da) {
            for (long db = -1; db <= 1; ++db) {
                const Complex cand = red.z0 + 0.5 * (static_cast<double>(da) +
                                                     static_cast<double>(db) * curve.tau);
                // Coordinates in the (1, tau) frame.
                const double beta = cand.imag() / im_tau;
                const double alpha = cand.real() - beta * curve.tau.real();
                if (alpha < -margin || alpha > 0.5 + margin) continue;
                if (beta < -margin || beta > 0.25 + margin) continue;
                out.push_back(cand);
            }
        }
    }
    return out;
}

// The four half-period representatives 0, 1/2, tau/2, (1 + tau)/2.
std::array<Complex, 4> half_shifts(const CurveParams& curve)
{
    return {Complex(0.0, 0.0), Complex(0.5, 0.0), 0.5 * curve.tau,
            Complex(0.5, 0.0) + 0.5 * curve.tau};
}

double min_dist(Complex q, const std::vector<Complex>& pts)
{
    double best = std::numeric_limits<double>::max();
    for (const Complex s : pts) best = std::min(best, std::abs(q - s));
    return best;
}

Complex nearest(Complex q, const std::vector<Complex>& pts)
{
    Complex bp = pts.front();
    double best = std::numeric_limits<double>::max();
    for (const Complex s : pts) {
        const double d = std::abs(q - s);
        if (d < best) {
            best = d;
            bp = s;
        }
    }
    return bp;
}

double finish(OperatorMatrix& op, bool symmetrize)
{
    const double norm = op.H.norm();
    const double defect = (norm > 0.0) ? (op.H - op.H.transpose()).norm() / norm : 0.0;
    op.selfadjoint_defect = defect;
    if (symmetrize) {
        Eigen::MatrixXd sym = 0.5 * (op.H + op.H.transpose());
        op.H = std::move(sym);
        op.symmetrized = true;
    }
    return defect;
}

} // namespace

void require_generic_hecke_point(Complex x, const CurveParams& curve)
{
    if (lattice_dist(2.0 * x, curve) < 1e-6) {
        throw degenerate_configuration_error(
            "Hecke point is a half-period (wp'(x) vanishes); choose a generic x");
    }
    for (const Complex t : curve.marked_points) {
        if (lattice_dist(2.0 * x - t, curve) < 1e-6) {
            throw degenerate_configuration_error(
                "Hecke modification point collides with a marked point");
        }
    }
}

OperatorMatrix assemble_m0(Complex x, const QuadGrid& grid, const CurveParams& curve,
                           bool symmetrize)
{
    require_generic_hecke_point(x, curve);
    const int n = static_cast<int>(grid.nodes.size());
    OperatorMatrix op;
    op.H.resize(n, n);
    op.x = x;
    op.tau = grid.tau;
    op.N = grid.N;
    op.kind = "m0";

    const double diam = grid.cell_diameter();
    const auto shifts = half_shifts(curve);

    // Quotient kernel on the moduli fundamental domain: the evenization
    // K(p,q,x) + K(p,-q,x) summed over the four half-period translates of q.
    // The translate sum is what makes the discretized operators commute for
    // different Hecke points: the plain evenized kernel restricted to this
    // domain is not the operator of the quotient and its commutators stall
    // at a nonzero level.
    const auto zsum = [&curve, x](Complex p, Complex q) {
        return std::abs(theta_log_deriv(p + q - x, curve) + theta_log_deriv(q + x - p, curve) -
                        theta_log_deriv(q - x - p, curve) - theta_log_deriv(q + x + p, curve));
    };
    const auto ksym = [&](Complex p, Complex q) {
        double total = 0.0;
        for (const Complex h : shifts) {
            total += zsum(p, q + h) + zsum(p, -q - h);
        }
        return total;
    };

    parallel_rows(n, [&](int i) {
        const Complex p = grid.nodes[static_cast<std::size_t>(i)];
        const auto sing = nearby_singular_points(p, x, curve, 3.0 * diam);
        const auto f = [&](Complex q) { return ksym(p, q); };
        for (int j = 0; j < n; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            if (grid.weights[ju] == 0.0) {
                op.H(i, j) = 0.0;
                continue;
            }
            const Complex q = grid.nodes[ju];
            const double d = sing.empty() ? std::numeric_limits<double>::max() : min_dist(q, sing);
            if (d <= diam) {
                op.H(i, j) = fan_integral(q, grid.edge_a, grid.edge_b, nearest(q, sing), f);
            } else {
                op.H(i, j) = f(q) * grid.weights[ju];
            }
        }
    });

    finish(op, symmetrize);
    return op;
}

OperatorMatrix assemble_p1(Complex x, const PlanarGrid& plane, const CurveParams& curve,
                           bool symmetrize)
{
    require_generic_hecke_point(x, curve);
    const QuadGrid& grid = plane.source;
    const int n = static_cast<int>(grid.nodes.size());
    OperatorMatrix op;
    op.H.resize(n, n);
    op.x = x;
    op.tau = grid.tau;
    op.N = grid.N;
    op.kind = "p1";

    const double diam = grid.cell_diameter();
    const Complex t = wp_pair(x, curve).first;
    const Complex cubic = 4.0 * t * t * t - curve.g2 * t - curve.g3;
    const double sqrt_cubic = std::sqrt(std::abs(cubic));

    // The pushforward weights range over many orders of magnitude (the area
    // Jacobian |wp'|^2 blows up toward the image of the lattice corner), so
    // the matrix is built in the weight-symmetric Nystrom form: entries carry
    // sqrt(w~_i w~_j) rather than the full column weight, which leaves the
    // spectrum unchanged and keeps the matrix numerically symmetric. The
    // half-period translate images carry the quotient structure, matching the
    // torus assembly term by term. Singular cells are integrated by pullback
    // with one area factor inside the integral and the row half-density
    // factor outside.
    const auto shifts = half_shifts(curve);
    parallel_rows(n, [&](int i) {
        const std::size_t iu = static_cast<std::size_t>(i);
        const Complex p = grid.nodes[iu];
        const Complex ri = plane.r[iu];
        const double row_jac = std::abs(plane.wp_prime[iu]) * std::sqrt(grid.weights[iu]);
        const auto sing = nearby_singular_points(p, x, curve, 3.0 * diam);
        const auto f_pull = [&](Complex q) {
            double total = 0.0;
            for (const Complex h : shifts) {
                const auto [wq, wqd] = wp_pair(q + h, curve);
                total += 2.0 * sqrt_cubic / std::abs(symmetric_quartic(ri, wq, t, curve)) *
                         std::abs(wqd);
            }
            return total;
        };
        for (int j = 0; j < n; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            if (grid.weights[ju] == 0.0) {
                op.H(i, j) = 0.0;
                continue;
            }
            const Complex q = grid.nodes[ju];
            const double d = sing.empty() ? std::numeric_limits<double>::max() : min_dist(q, sing);
            if (d <= diam) {
                op.H(i, j) = row_jac / std::sqrt(grid.weights[ju]) *
                             fan_integral(q, grid.edge_a, grid.edge_b, nearest(q, sing), f_pull);
            } else {
                double entry = 0.0;
                for (int s = 0; s < 4; ++s) {
                    const std::size_t su = static_cast<std::size_t>(s);
                    entry += 2.0 * sqrt_cubic /
                             std::abs(symmetric_quartic(ri, plane.r_shift[ju][su], t, curve)) *
                             plane.jac_shift[ju][su];
                }
                op.H(i, j) = entry * row_jac * std::sqrt(grid.weights[ju]);
            }
        }
    });

    finish(op, symmetrize);
    return op;
}

} // namespace heckelab
