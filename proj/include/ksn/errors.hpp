#ifndef KSN_ERRORS_HPP
#define KSN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ksn {

/// Iterative numerics (quadrature, nonlinear corrector) failed to converge.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad configuration file or unknown/invalid option.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Output file could not be opened or written.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ksn

#endif
