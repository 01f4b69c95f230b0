#ifndef HECKELAB_COMMANDS_HPP
#define HECKELAB_COMMANDS_HPP

#include "heckelab/config.hpp"

#include <string>

namespace heckelab {

/// Exit-code contract shared by every command:
///   0 = all checks pass, 2 = numerical check failure, 3 = configuration error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 2;
inline constexpr int exit_config_error = 3;

/// Runs the analytic identity suite on the configured curve and writes
/// <out>/identities.json (one record per identity: name, sample count, max
/// residual, pass). Returns exit_ok or exit_check_failed.
int cmd_identities(const RunConfig& cfg);

/// Assembles (or reuses cached) m0 operators for every configured Hecke
/// point and grid, writes EHK1 caches, <out>/eigenvalues.csv and
/// <out>/defects.json (self-adjointness bounds, commutator defects,
/// eigenvalue Cauchy records).
int cmd_operator(const RunConfig& cfg);

/// Builds m0 and plane-pushforward operators for the first Hecke point over
/// the grid sweep and writes <out>/compare_p1.json with index-wise relative
/// eigenvalue differences for the top K.
int cmd_compare_p1(const RunConfig& cfg);

/// Loads a cached operator and writes its spectrum next to the other
/// reports as <out>/spectrum.csv.
int cmd_spectrum(const RunConfig& cfg, const std::string& cache_path);

} // namespace heckelab

#endif
