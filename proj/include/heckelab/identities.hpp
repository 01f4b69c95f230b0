#ifndef HECKELAB_IDENTITIES_HPP
#define HECKELAB_IDENTITIES_HPP

#include "heckelab/elliptic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace heckelab {

/// Deterministic sampler: identical sequences for identical seeds on every
/// platform (raw 64-bit draws mapped to [0,1) directly).
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Point alpha + beta*tau with alpha, beta in [margin, 1 - margin).
    Complex cell_point(const CurveParams& curve, double margin = 0.05);

private:
    std::uint64_t state_;
};

struct IdentityRecord {
    std::string name;
    int samples = 0;
    double max_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Scaled residual checks for every analytic identity the special-function,
/// modification-geometry and kernel layers promise. Each record reports the
/// max residual over `samples` seeded draws against the given tolerance.
std::vector<IdentityRecord> run_identity_suite(const CurveParams& curve, std::uint64_t seed,
                                               int samples, double tol);

/// Subsets, for callers that want to time or report them separately.
std::vector<IdentityRecord> elliptic_identities(const CurveParams& curve, std::uint64_t seed,
                                                int samples, double tol);
std::vector<IdentityRecord> heckegeom_identities(const CurveParams& curve, std::uint64_t seed,
                                                 int samples, double tol);
std::vector<IdentityRecord> kernel_identities(const CurveParams& curve, std::uint64_t seed,
                                              int samples, double tol);

} // namespace heckelab

#endif
