#ifndef HECKELAB_CONFIG_HPP
#define HECKELAB_CONFIG_HPP

#include "heckelab/elliptic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace heckelab {

/// Parsed and validated run configuration. Every command is a pure function
/// of (config, code version): identical configs produce byte-identical
/// outputs.
struct RunConfig {
    Complex tau{0.3, 1.1};
    std::vector<Complex> marked_points{{0.0, 0.0}, {0.37, 0.0}};
    std::vector<Complex> hecke_points{{0.22, 0.05}, {0.41, 0.13}};
    std::vector<int> grids{16, 32};
    int m = 0;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    int samples = 200;
    int series_terms = 32;
    int top_k = 10;
    double compare_threshold = 0.05;
    std::string out_dir = "out";

    CurveParams curve() const;
};

/// Thrown on malformed or invalid configuration; the message names the field
/// (and the byte offset for parse errors).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

RunConfig load_config(const std::string& path);
RunConfig default_config();

} // namespace heckelab

#endif
