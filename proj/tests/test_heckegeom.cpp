#include "heckelab/heckegeom.hpp"
#include "heckelab/errors.hpp"
#include "heckelab/identities.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

using namespace heckelab;

namespace {

CurveParams test_curve()
{
    return CurveParams::make(Complex(0.3, 1.1), {Complex(0.0, 0.0), Complex(0.37, 0.0)});
}

} // namespace

TEST_SUITE_BEGIN("heckegeom");

TEST_CASE("cross ratio: zero, central value, evenness, pole guard")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);

    CHECK(std::abs(cross_ratio(p, x - p, x, curve)) < 1e-13);

    const Complex thm = theta(p - x, curve), thp = theta(p + x, curve);
    CHECK(std::abs(cross_ratio(p, Complex(0.0, 0.0), x, curve) - thm * thm / (thp * thp)) <
          1e-12);

    const Complex q(0.41, 0.23);
    CHECK(std::abs(cross_ratio(p, q, x, curve) - cross_ratio(p, -q, x, curve)) < 1e-12);

    CHECK_THROWS_AS(cross_ratio(p, x + p, x, curve), singular_argument_error);
}

TEST_CASE("solve matches the brute-force grid oracle")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);
    const Complex s(0.7, 0.4);

    const HeckeSolve sol = solve_modification(p, x, ProjectivePoint::affine(s), curve);
    const Complex q_oracle = oracles::brute_force_solve(p, x, s, curve, 400);
    const double dist = std::min(lattice_dist(sol.q - q_oracle, curve),
                                 lattice_dist(sol.q + q_oracle, curve));
    CHECK(dist < 1e-8);
    CHECK(sol.residual < 1e-10);
    CHECK(std::abs(sol.r1 + sol.r2 - 2.0 * x) < 1e-12);
}

TEST_CASE("solve limits: s to zero and s at the central value")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);

    const auto sol = solve_modification(p, x, ProjectivePoint::affine(Complex(1e-6, 0.0)), curve);
    const double d = std::min(lattice_dist(sol.q - (x - p), curve),
                              lattice_dist(sol.q + (x - p), curve));
    CHECK(d < 1e-3);

    const Complex c0 = cross_ratio(p, Complex(0.0, 0.0), x, curve);
    CHECK_THROWS_AS(solve_modification(p, x, ProjectivePoint::affine(c0), curve),
                    degenerate_configuration_error);

    // A value close to (but not at) the central one gives a root near the lattice.
    const auto sol2 = solve_modification(
        p, x, ProjectivePoint::affine(c0 * (1.0 + Complex(1e-4, 0.0))), curve);
    CHECK(std::abs(sol2.wp_q) > 1e3);
    CHECK(lattice_dist(sol2.q, curve) < 0.05);
}

TEST_CASE("degenerate lines are rejected")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);
    CHECK_THROWS_AS(solve_modification(p, x, ProjectivePoint::affine(Complex(0.0, 0.0)), curve),
                    degenerate_configuration_error);
    CHECK_THROWS_AS(solve_modification(p, x, ProjectivePoint::infinity(), curve),
                    degenerate_configuration_error);
}

TEST_CASE("residue identities at the solved root")
{
    const auto curve = test_curve();
    SampleRng rng(21);
    for (int k = 0; k < 20; ++k) {
        const Complex p = 0.5 * rng.cell_point(curve, 0.1);
        const Complex x = 0.5 * rng.cell_point(curve, 0.1);
        const Complex s(rng.uniform(0.3, 1.4), rng.uniform(-0.5, 0.5));
        HeckeSolve sol;
        try {
            sol = solve_modification(p, x, ProjectivePoint::affine(s), curve);
        } catch (const std::exception&) {
            continue;
        }
        const Complex lhs1 = sol.c * theta(sol.r1 - 2.0 * x - p, curve);
        const Complex rhs1 = theta(sol.r1 - 2.0 * x + p, curve);
        CHECK(std::abs(lhs1 - rhs1) < 1e-9 * std::max(1.0, std::abs(rhs1)));
        const Complex lhs2 = sol.c * theta(sol.r1 - p, curve);
        const Complex rhs2 = s * theta(sol.r1 + p, curve);
        CHECK(std::abs(lhs2 - rhs2) < 1e-9 * std::max(1.0, std::abs(rhs2)));
    }
}

TEST_CASE("line transport inverts under p <-> q")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), q(0.12, 0.39), x(0.22, 0.05), t(0.37, 0.0);
    const MobiusMap g_pq = line_transport(x, p, q, t, curve);
    const MobiusMap g_qp = line_transport(x, q, p, t, curve);
    CHECK(pgl_distance(g_qp, g_pq.inverse()) < 1e-9);
    const MobiusMap id = compose(g_qp, g_pq);
    CHECK(pgl_distance(id, MobiusMap{1.0, 0.0, 0.0, 1.0}) < 1e-9);
}

TEST_CASE("negating q inverts the transported value")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), q(0.12, 0.39), x(0.22, 0.05), t(0.37, 0.0);
    const MobiusMap g = line_transport(x, p, q, t, curve);
    const MobiusMap gm = line_transport(x, p, -q, t, curve);
    for (const Complex y : {Complex(0.8, -0.3), Complex(-1.2, 0.5), Complex(0.05, 0.02)}) {
        const ProjectivePoint yp = ProjectivePoint::affine(y);
        CHECK(gm.apply(yp).distance(g.apply(yp).inverted()) < 1e-12);
    }
}

TEST_CASE("determinant factorizes through L at 50 random probe points")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), q(0.12, 0.39), x(0.22, 0.05);
    const Complex L = determinant_factor(p, q, x, curve);
    SampleRng rng(31);
    for (int k = 0; k < 50; ++k) {
        const Complex t = rng.cell_point(curve, 0.03);
        const MobiusMap g = line_transport(x, p, q, t, curve);
        const Complex rhs = L * theta(t, curve) * theta(t - 2.0 * x, curve);
        CHECK(std::abs(g.det() - rhs) < 1e-9 * std::max(1.0, std::abs(g.det())));
    }
    // Swapping p and q leaves L unchanged.
    CHECK(std::abs(determinant_factor(q, p, x, curve) - L) < 1e-12 * std::max(1.0, std::abs(L)));
    // 2q on the lattice kills L.
    CHECK(std::abs(determinant_factor(p, Complex(0.5, 0.0), x, curve)) < 1e-12);
}

TEST_CASE("measure polynomial fit validates and flags degeneracy")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);
    const MeasureData md = measure_polynomial(p, x, curve);
    CHECK(md.fit_residual < 1e-9);

    // Check P(f) = f'_p at a fresh point.
    const Complex q(0.27, 0.44);
    const Complex f = cross_ratio(p, q, x, curve);
    const Complex fp = f * cross_ratio_log_dp(p, q, x, curve);
    CHECK(std::abs(md.eval(f) - fp) < 1e-8 * std::max(1.0, std::abs(fp)));

    // Roots of P are the places where q'_v / q'_p blows up, i.e. f'_p = 0.
    for (const Complex root : md.roots()) {
        const auto sol = solve_modification(p, x, ProjectivePoint::affine(root), curve);
        const Complex fpv = cross_ratio(p, sol.q, x, curve) *
                            cross_ratio_log_dp(p, sol.q, x, curve);
        CHECK(std::abs(fpv) < 1e-7);
    }

    CHECK_THROWS_AS(measure_polynomial(p, Complex(1e-10, 0.0), curve), inconsistency_error);
}

TEST_CASE("hecke transform: no parabolic data reduces to the solve")
{
    const auto curve = CurveParams::make(Complex(0.3, 1.1));
    ModuliPoint pt;
    pt.p = Complex(0.31, 0.17);
    const Complex x(0.22, 0.05);
    const ProjectivePoint s = ProjectivePoint::affine(Complex(0.7, 0.4));
    const auto [image, sol] = hecke_transform(pt, x, s, curve);
    CHECK(image.y.empty());
    const auto direct = solve_modification(pt.p, x, s, curve);
    CHECK(lattice_dist(2.0 * (image.p - direct.q), curve) < 1e-6);
}

TEST_CASE("hecke transform: both roots give equivalent points")
{
    const auto curve = test_curve();
    ModuliPoint pt;
    pt.p = Complex(0.31, 0.17);
    pt.y.push_back(ProjectivePoint::affine(Complex(1.3, -0.6)));
    const Complex x(0.22, 0.05);
    const ProjectivePoint s = ProjectivePoint::affine(Complex(0.7, 0.4));

    const auto sol = solve_modification(pt.p, x, s, curve);

    // Build the image with each root by hand and compare as moduli points.
    ModuliPoint im_pos, im_neg;
    im_pos.p = sol.q;
    im_neg.p = -sol.q;
    im_pos.y.push_back(line_transport(x, pt.p, sol.q, curve.marked_points[1], curve).apply(pt.y[0]));
    im_neg.y.push_back(line_transport(x, pt.p, -sol.q, curve.marked_points[1], curve).apply(pt.y[0]));
    CHECK(equivalent(im_pos, im_neg, curve));

    const auto [image, sol2] = hecke_transform(pt, x, s, curve);
    CHECK(equivalent(image, im_pos, curve));
}

TEST_CASE("hecke transform matches direct formula evaluation at m = 2")
{
    const auto curve = CurveParams::make(
        Complex(0.0, 1.0), {Complex(0.0, 0.0), Complex(0.37, 0.0), Complex(0.21, 0.13)});
    ModuliPoint pt;
    pt.p = Complex(0.29, 0.31);
    pt.y.push_back(ProjectivePoint::affine(Complex(0.9, 0.2)));
    pt.y.push_back(ProjectivePoint::affine(Complex(-0.4, 1.1)));
    const Complex x(0.17, 0.23);
    const ProjectivePoint s = ProjectivePoint::affine(Complex(0.8, -0.3));

    const auto [image, sol] = hecke_transform(pt, x, s, curve);

    // Independent route: brute-force the root, then evaluate the transported
    // values directly from theta~ ratios.
    const Complex q = oracles::brute_force_solve(pt.p, x, s.value(), curve, 200);
    auto tt = [&](Complex z, Complex a) { return theta(z - a, curve) / theta(-a, curve); };
    ModuliPoint direct;
    direct.p = q;
    for (int i = 1; i <= 2; ++i) {
        const Complex t = curve.marked_points[static_cast<std::size_t>(i)];
        const Complex y = pt.y[static_cast<std::size_t>(i - 1)].value();
        const Complex z = (tt(t, -pt.p + x + q) * y - tt(t, pt.p + x + q)) /
                          (tt(t, -pt.p + x - q) * y - tt(t, pt.p + x - q));
        direct.y.push_back(ProjectivePoint::affine(z));
    }
    CHECK(equivalent(image, direct, curve));
}

TEST_SUITE_END();
