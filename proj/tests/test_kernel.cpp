#include "heckelab/kernel.hpp"
#include "heckelab/errors.hpp"
#include "heckelab/identities.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

using namespace heckelab;

namespace {

CurveParams test_curve()
{
    return CurveParams::make(Complex(0.3, 1.1));
}

} // namespace

TEST_SUITE_BEGIN("kernel");

TEST_CASE("quartic is exactly permutation symmetric")
{
    const auto curve = test_curve();
    const Complex r(1.3, -0.2), s(0.4, 0.9), t(-0.7, 0.15);
    const Complex q0 = symmetric_quartic(r, s, t, curve);
    CHECK(symmetric_quartic(t, r, s, curve) == q0);
    CHECK(symmetric_quartic(s, t, r, curve) == q0);
    CHECK(symmetric_quartic(s, r, t, curve) == q0);
}

TEST_CASE("quartic equals the shifted product form")
{
    const auto curve = test_curve();
    SampleRng rng(41);
    for (int k = 0; k < 50; ++k) {
        const Complex p = 0.5 * rng.cell_point(curve, 0.08);
        const Complex x = 0.5 * rng.cell_point(curve, 0.08);
        if (lattice_dist(p - x, curve) < 0.05 || lattice_dist(p + x, curve) < 0.05) continue;
        const Complex wp_p = wp_pair(p, curve).first;
        const Complex wp_x = wp_pair(x, curve).first;
        const Complex q = 0.5 * rng.cell_point(curve, 0.08);
        const Complex wp_q = wp_pair(q, curve).first;
        const Complex lhs = symmetric_quartic(wp_q, wp_p, wp_x, curve);
        const Complex rhs = (wp_p - wp_x) * (wp_p - wp_x) *
                            (wp_q - wp_pair(p - x, curve).first) *
                            (wp_q - wp_pair(p + x, curve).first);
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("quartic coefficient extraction in the first slot")
{
    const auto curve = test_curve();
    const Complex s(0.8, 0.1), t(-0.5, 0.4);
    // Q is quadratic in r: Q = (s-t)^2 r^2 + c1 r + c0.
    const Complex q_plus = symmetric_quartic(Complex(1.0, 0.0), s, t, curve);
    const Complex q_minus = symmetric_quartic(Complex(-1.0, 0.0), s, t, curve);
    const Complex c1 = 0.5 * (q_plus - q_minus);
    const Complex expected =
        -(2.0 * t * s * s + 2.0 * t * t * s - 0.5 * curve.g2 * (t + s) - curve.g3);
    CHECK(std::abs(c1 - expected) < 1e-12 * std::max(1.0, std::abs(expected)));

    // As a polynomial in s, the r-coefficient is -(A s^2 + B s + C) with
    // A = 2t and B = 2t^2 - g2/2.
    auto r_coeff = [&](Complex sv) {
        return 0.5 * (symmetric_quartic(Complex(1.0, 0.0), sv, t, curve) -
                      symmetric_quartic(Complex(-1.0, 0.0), sv, t, curve));
    };
    const Complex f0 = r_coeff(Complex(0.0, 0.0));
    const Complex f1 = r_coeff(Complex(1.0, 0.0));
    const Complex fm1 = r_coeff(Complex(-1.0, 0.0));
    const Complex a_fd = -(0.5 * (f1 + fm1) - f0);
    const Complex b_fd = -(0.5 * (f1 - fm1));
    CHECK(std::abs(a_fd - 2.0 * t) < 1e-12 * std::max(1.0, std::abs(t)));
    CHECK(std::abs(b_fd - (2.0 * t * t - 0.5 * curve.g2)) < 1e-11);
}

TEST_CASE("torus kernel symmetry and closed forms")
{
    const auto curve = test_curve();
    SampleRng rng(43);
    int tested = 0;
    for (int k = 0; k < 80 && tested < 40; ++k) {
        const Complex p = 0.5 * rng.cell_point(curve, 0.08);
        const Complex q = 0.5 * rng.cell_point(curve, 0.08);
        const Complex x = 0.5 * rng.cell_point(curve, 0.08);
        if (singular_distance(p, q, x, curve) < 0.07 ||
            singular_distance(q, p, x, curve) < 0.07 ||
            singular_distance(x, q, p, curve) < 0.07 ||
            lattice_dist(p, curve) < 0.05 || lattice_dist(q, curve) < 0.05 ||
            lattice_dist(x, curve) < 0.05) {
            continue;
        }
        ++tested;
        const KernelValue kv = kernel_torus(p, q, x, curve);
        CHECK(kv.value >= 0.0);
        CHECK(kv.dist_to_singular > 0.0);
        const double k_sym = kernel_torus(q, p, x, curve).value;
        CHECK(std::abs(kv.value - k_sym) < 1e-9 * std::max(1.0, kv.value));

        const auto [wp_p, wd_p] = wp_pair(p, curve);
        const auto [wp_q, wd_q] = wp_pair(q, curve);
        const auto [wp_x, wd_x] = wp_pair(x, curve);
        const double cross = std::abs(wd_p * wd_q * wd_x) /
                             std::abs(symmetric_quartic(wp_q, wp_p, wp_x, curve));
        CHECK(std::abs(kv.value - cross) < 1e-8 * std::max(1.0, kv.value));

        const double plane = kernel_plane(wp_p, wp_q, wp_x, curve);
        CHECK(std::abs(plane * std::abs(wd_p * wd_q) - kv.value) <
              1e-8 * std::max(1.0, kv.value));
    }
    CHECK(tested >= 30);
}

TEST_CASE("kernel grows at the simple-pole rate near the divisor")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);
    const Complex q0 = p - x;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int n = 16;
    for (int k = 0; k < n; ++k) {
        const double r = std::pow(10.0, -2.5 - 0.2 * k);
        const Complex q = q0 + r * std::exp(Complex(0.0, 0.7));
        const double kv = kernel_torus(p, q, x, curve).value;
        const double lx = std::log(r), ly = std::log(kv);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.01));

    // K * |q - q0| tends to the residue modulus 1.
    const Complex q = q0 + 1e-6 * std::exp(Complex(0.0, 0.7));
    CHECK(kernel_torus(p, q, x, curve).value * 1e-6 == doctest::Approx(1.0).epsilon(1e-4));

    CHECK_THROWS_AS(kernel_torus(p, q0, x, curve), singular_argument_error);
}

TEST_CASE("singular distance: exact hits, translates, brute force")
{
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);
    CHECK(singular_distance(p, p + x, x, curve) < 1e-14);
    CHECK(singular_distance(p, p + x + 1.0 + curve.tau, x, curve) < 1e-13);

    SampleRng rng(47);
    for (int k = 0; k < 30; ++k) {
        const Complex q = rng.cell_point(curve, 0.02);
        double brute = std::numeric_limits<double>::max();
        for (const Complex base : {p + x, p - x, -p + x, -p - x}) {
            for (long a = -2; a <= 2; ++a) {
                for (long b = -2; b <= 2; ++b) {
                    brute = std::min(brute, std::abs(q - base - static_cast<double>(a) -
                                                     static_cast<double>(b) * curve.tau));
                }
            }
        }
        CHECK(singular_distance(p, q, x, curve) == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("plane kernel: symmetry in the first two slots and branch zeros")
{
    const auto curve = test_curve();
    const Complex r(0.7, 0.3), s(-0.8, 1.1);
    const Complex t_val = wp_pair(Complex(0.29, 0.41), curve).first;
    CHECK(kernel_plane(r, s, t_val, curve) ==
          doctest::Approx(kernel_plane(s, r, t_val, curve)).epsilon(1e-12));

    // t at a branch point of the cubic: the kernel factor vanishes.
    const Complex t_branch = wp_pair(Complex(0.5, 0.0), curve).first;
    const double kv = kernel_plane(r, s, t_branch, curve);
    CHECK(kv < 1e-5);
}

TEST_CASE("measure change of variables connects the line chart to the q chart")
{
    // Fixed bump in the Weierstrass coordinate, evaluated along a region away
    // from every singular locus; equality of the two integral forms links the
    // line-parameter measure |q'_p| / |v P(v)| to the kernel density.
    const auto curve = test_curve();
    const Complex p(0.31, 0.17), x(0.22, 0.05);

    const Complex w_center(1.4, 0.9);
    const double w_radius = 0.55;
    const auto psi = [&](Complex w) {
        return oracles::bump(std::norm((w - w_center) / w_radius));
    };

    // q-side: fine midpoint rule over the full fundamental cell.
    const auto f_q = [&](Complex q) {
        const double d = singular_distance(p, q, x, curve);
        if (d < 1e-6) return 0.0;
        const double psi_v = psi(wp_pair(q, curve).first);
        if (psi_v == 0.0) return 0.0;
        return psi_v * kernel_torus(p, q, x, curve).value;
    };
    const double i_q = oracles::integrate_frame_box(f_q, curve.tau, 0.0, 1.0, 0.0, 1.0, 220);

    // v-side: both branches contribute equally; P from the interpolation fit.
    const MeasureData md = measure_polynomial(p, x, curve);
    const Complex c0 = cross_ratio(p, Complex(0.0, 0.0), x, curve);
    const Complex wp_xmp = wp_pair(x - p, curve).first;
    const Complex wp_xpp = wp_pair(x + p, curve).first;
    const auto f_v = [&](Complex v) {
        const Complex denom = c0 - v;
        if (std::abs(denom) < 1e-9 || std::abs(v) < 1e-9) return 0.0;
        const Complex w = (c0 * wp_xmp - v * wp_xpp) / denom;
        const double psi_v = psi(w);
        if (psi_v == 0.0) return 0.0;
        const Complex q = wp_inverse(w, curve);
        const Complex qp = qp_derivative(p, q, x, curve);
        return 2.0 * psi_v * std::abs(qp) / (std::abs(v) * std::abs(md.eval(v)));
    };
    // Bounding box of the support in the v plane from the boundary image.
    double re_lo = 1e9, re_hi = -1e9, im_lo = 1e9, im_hi = -1e9;
    for (int k = 0; k < 128; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / 128;
        const Complex w = w_center + w_radius * std::exp(Complex(0.0, ang));
        const Complex v = c0 * (w - wp_xmp) / (w - wp_xpp);
        re_lo = std::min(re_lo, v.real());
        re_hi = std::max(re_hi, v.real());
        im_lo = std::min(im_lo, v.imag());
        im_hi = std::max(im_hi, v.imag());
    }
    const double pad_re = 0.1 * (re_hi - re_lo), pad_im = 0.1 * (im_hi - im_lo);
    re_lo -= pad_re;
    re_hi += pad_re;
    im_lo -= pad_im;
    im_hi += pad_im;
    // Plain midpoint grid in the v plane (the integrand is smooth and
    // compactly supported inside the box).
    double i_v = 0.0;
    const int nv = 160;
    const double dre = (re_hi - re_lo) / nv, dim = (im_hi - im_lo) / nv;
    for (int a = 0; a < nv; ++a) {
        for (int b = 0; b < nv; ++b) {
            i_v += f_v(Complex(re_lo + (a + 0.5) * dre, im_lo + (b + 0.5) * dim));
        }
    }
    i_v *= dre * dim;

    CHECK(i_v == doctest::Approx(i_q).epsilon(1e-3));
}

TEST_SUITE_END();
