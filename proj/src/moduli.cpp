#include "heckelab/moduli.hpp"
#include "heckelab/errors.hpp"

#include <cmath>
#include <numbers>

namespace heckelab {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I(0.0, 1.0);

// Lexicographic comparison with a tie band, used for canonical choices.
int fuzzy_cmp(double a, double b, double band)
{
    if (a < b - band) return -1;
    if (a > b + band) return 1;
    return 0;
}

// Affine ordering key for a projective value: infinity sorts last.
int cmp_projective(const ProjectivePoint& a, const ProjectivePoint& b)
{
    constexpr double band = 1e-12;
    const bool ia = a.is_infinity(1e-9), ib = b.is_infinity(1e-9);
    if (ia != ib) return ia ? 1 : -1;
    if (ia && ib) return 0;
    const Complex va = a.value(), vb = b.value();
    if (int c = fuzzy_cmp(va.real(), vb.real(), band * std::max(1.0, std::abs(va)))) return c;
    if (int c = fuzzy_cmp(va.imag(), vb.imag(), band * std::max(1.0, std::abs(va)))) return c;
    return 0;
}

int cmp_points(const ModuliPoint& a, const ModuliPoint& b)
{
    constexpr double band = 1e-12;
    if (int c = fuzzy_cmp(a.p.real(), b.p.real(), band)) return c;
    if (int c = fuzzy_cmp(a.p.imag(), b.p.imag(), band)) return c;
    for (std::size_t i = 0; i < a.y.size(); ++i) {
        if (int c = cmp_projective(a.y[i], b.y[i])) return c;
    }
    return 0;
}

} // namespace

ProjectivePoint::ProjectivePoint(Complex u, Complex w)
{
    const double norm = std::sqrt(std::norm(u) + std::norm(w));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw invalid_input_error("ProjectivePoint: coordinates must be finite and not both zero");
    }
    u_ = u / norm;
    w_ = w / norm;
    const Complex lead = (std::abs(u_) >= std::abs(w_)) ? u_ : w_;
    const Complex phase = lead / std::abs(lead);
    u_ /= phase;
    w_ /= phase;
}

double ProjectivePoint::distance(const ProjectivePoint& other) const
{
    return std::abs(u_ * other.w_ - other.u_ * w_);
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2)
{
    GroupElement out;
    out.flip = g1.flip != g2.flip;
    const long sign = g2.flip ? -1 : 1;
    out.a = g2.a + sign * g1.a;
    out.b = g2.b + sign * g1.b;
    return out;
}

GroupElement inverse(const GroupElement& g)
{
    // (flip, v)^-1 = (flip, v * (flip ? +1 : -1)).
    GroupElement out;
    out.flip = g.flip;
    const long sign = g.flip ? 1 : -1;
    out.a = sign * g.a;
    out.b = sign * g.b;
    return out;
}

bool ModuliPoint::generic_position(double eps) const
{
    for (const auto& yi : y) {
        if (std::abs(yi.u()) <= eps || std::abs(yi.w()) <= eps) return false;
    }
    return true;
}

bool is_degenerate(const ModuliPoint& pt, const CurveParams& curve)
{
    return lattice_dist(2.0 * pt.p, curve) < curve.eps_sing;
}

Complex translation_twist(long b, Complex t)
{
    return std::exp(2.0 * pi * I * static_cast<double>(b) * t);
}

ModuliPoint act(const GroupElement& g, const ModuliPoint& pt, const CurveParams& curve)
{
    if (pt.y.size() != static_cast<std::size_t>(curve.marked_count())) {
        throw invalid_input_error("act: point has wrong number of parabolic values");
    }
    ModuliPoint out;
    out.p = pt.p + 0.5 * (static_cast<double>(g.a) + static_cast<double>(g.b) * curve.tau);
    out.y.reserve(pt.y.size());
    for (std::size_t i = 0; i < pt.y.size(); ++i) {
        const Complex twist = translation_twist(g.b, curve.marked_points[i + 1]);
        out.y.push_back(pt.y[i].scaled(twist));
    }
    if (g.flip) {
        out.p = -out.p;
        for (auto& yi : out.y) yi = yi.inverted();
    }
    return out;
}

std::pair<ModuliPoint, GroupElement> canonicalize(const ModuliPoint& pt, const CurveParams& curve)
{
    // Reduce p into the half-cell of the half-lattice.
    const auto red = reduce_to_cell(pt.p, curve, 0.5);
    const GroupElement g_red = GroupElement::translation(-red.a, -red.b);
    ModuliPoint reduced = act(g_red, pt, curve);

    // Candidate via the flip, reduced again.
    const GroupElement g_flip = GroupElement::flipped();
    ModuliPoint flipped = act(g_flip, reduced, curve);
    const auto red2 = reduce_to_cell(flipped.p, curve, 0.5);
    const GroupElement g_flip_red =
        compose(GroupElement::translation(-red2.a, -red2.b), g_flip);
    ModuliPoint flipped_reduced = act(GroupElement::translation(-red2.a, -red2.b), flipped, curve);

    if (cmp_points(flipped_reduced, reduced) < 0) {
        return {flipped_reduced, compose(g_flip_red, g_red)};
    }
    return {reduced, g_red};
}

bool equivalent(const ModuliPoint& a, const ModuliPoint& b, const CurveParams& curve)
{
    if (a.y.size() != b.y.size()) return false;
    const auto [ca, ga] = canonicalize(a, curve);
    const auto [cb, gb] = canonicalize(b, curve);

    const double tol = curve.tol;
    auto match = [&](const ModuliPoint& lhs, const ModuliPoint& rhs) {
        if (lattice_dist(lhs.p - rhs.p, curve, 0.5) > tol) return false;
        for (std::size_t i = 0; i < lhs.y.size(); ++i) {
            if (lhs.y[i].distance(rhs.y[i]) > tol) return false;
        }
        return true;
    };
    if (match(ca, cb)) return true;
    // The flip tie-break can land on opposite sides for points within tol of
    // the boundary of the fundamental domain; compare against the flipped
    // candidate as well.
    ModuliPoint cb_f = act(GroupElement::flipped(), cb, curve);
    const auto redf = reduce_to_cell(cb_f.p, curve, 0.5);
    cb_f = act(GroupElement::translation(-redf.a, -redf.b), cb_f, curve);
    return match(ca, cb_f);
}

} // namespace heckelab
