#ifndef HECKELAB_MODULI_HPP
#define HECKELAB_MODULI_HPP

#include "heckelab/elliptic.hpp"

#include <vector>

namespace heckelab {

/// A point of the projective line stored as a normalized pair (u : w) with
/// |u|^2 + |w|^2 = 1 and the first nonzero coordinate rotated real-positive,
/// so that comparisons are stable near 0 and infinity.
class ProjectivePoint {
public:
    ProjectivePoint() : u_(0.0, 0.0), w_(1.0, 0.0) {}
    ProjectivePoint(Complex u, Complex w);

    static ProjectivePoint affine(Complex y) { return ProjectivePoint(y, Complex(1.0, 0.0)); }
    static ProjectivePoint infinity() { return ProjectivePoint(Complex(1.0, 0.0), Complex(0.0, 0.0)); }

    Complex u() const { return u_; }
    Complex w() const { return w_; }
    bool is_infinity(double eps = 1e-14) const { return std::abs(w_) <= eps; }
    /// Affine value u/w; infinite for points at infinity.
    Complex value() const { return u_ / w_; }

    ProjectivePoint inverted() const { return ProjectivePoint(w_, u_); }
    ProjectivePoint scaled(Complex factor) const { return ProjectivePoint(factor * u_, w_); }

    /// Chordal distance |u1 w2 - u2 w1| between normalized representatives
    /// (the sine of the angle between the lines; 0 iff projectively equal).
    double distance(const ProjectivePoint& other) const;

private:
    Complex u_, w_;
};

/// Element (flip, a, b) of the order-two extension of Z^2 acting on the
/// moduli coordinates: first translate by (a, b), then flip if set.
/// flip * (a,b) * flip = (-a,-b).
struct GroupElement {
    bool flip = false;
    long a = 0;
    long b = 0;

    static GroupElement identity() { return {}; }
    static GroupElement translation(long a, long b) { return {false, a, b}; }
    static GroupElement flipped() { return {true, 0, 0}; }
};

/// Composition g1 * g2 (apply g2 first).
GroupElement compose(const GroupElement& g1, const GroupElement& g2);
GroupElement inverse(const GroupElement& g);

/// Birational coordinates on the even moduli space: the elliptic parameter p
/// of the split bundle and one projective line value per marked point
/// t_1, ..., t_m (the value at t_0 is normalized away).
struct ModuliPoint {
    Complex p;
    std::vector<ProjectivePoint> y;

    /// True when every y_i avoids 0 and infinity.
    bool generic_position(double eps = 1e-12) const;
};

/// Whether 2p lies on the lattice (extra-automorphism locus); such points are
/// representable but flagged and excluded from operator quadrature.
bool is_degenerate(const ModuliPoint& pt, const CurveParams& curve);

/// Group action: (a,b) sends (p, y_i) to (p + a/2 + b tau/2, e^{2 pi i b t_i} y_i);
/// the flip sends (p, y_i) to (-p, 1/y_i). Exact given exact exponential factors.
ModuliPoint act(const GroupElement& g, const ModuliPoint& pt, const CurveParams& curve);

/// The twist factor e^{2 pi i b t} applied to y_i by the translation part;
/// exposed separately so the exponent convention is auditable in one place.
Complex translation_twist(long b, Complex t);

/// Canonical orbit representative: p reduced to the half-cell of the
/// half-lattice, then the lexicographically smaller of the point and its
/// flip. Returns the representative and the group element that produces it
/// from the input. Idempotent; degenerate points are still canonicalized.
std::pair<ModuliPoint, GroupElement> canonicalize(const ModuliPoint& pt, const CurveParams& curve);

/// Orbit equivalence: canonical representatives coincide within tol
/// (lattice-reduced distance on p, chordal distance on each y_i).
bool equivalent(const ModuliPoint& a, const ModuliPoint& b, const CurveParams& curve);

} // namespace heckelab

#endif
