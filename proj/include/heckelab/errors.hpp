#ifndef HECKELAB_ERRORS_HPP
#define HECKELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace heckelab {

// Invalid or non-finite input values.
class invalid_input_error : public std::invalid_argument {
public:
    explicit invalid_input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Argument landed on (or too close to) a lattice point / pole / excluded divisor.
class singular_argument_error : public std::domain_error {
public:
    explicit singular_argument_error(const std::string& what, double distance = 0.0)
        : std::domain_error(what), dist(distance) {}
    double dist;
};

// Parameter configuration is degenerate (half-period Hecke point, line through
// the excluded divisor, vanishing determinant locus).
class degenerate_configuration_error : public std::domain_error {
public:
    explicit degenerate_configuration_error(const std::string& what) : std::domain_error(what) {}
};

// Iterative solver did not reach its target residual.
class no_convergence_error : public std::runtime_error {
public:
    no_convergence_error(const std::string& what, double residual)
        : std::runtime_error(what), best_residual(residual) {}
    double best_residual;
};

// An internal cross-check failed (e.g. an over-determined fit does not validate).
class inconsistency_error : public std::runtime_error {
public:
    explicit inconsistency_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace heckelab

#endif
