#ifndef KPP_ERRORS_HPP
#define KPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kpp {

// Bad user input: rejected parameters, malformed config, unknown keys.
// Maps to process exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a solver: non-convergence, invariant violation,
// sentinel breach.  Maps to process exit code 3.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& module, const std::string& diagnostic)
        : std::runtime_error(module + ": " + diagnostic), module_(module) {}
    const std::string& module_name() const { return module_; }

private:
    std::string module_;
};

} // namespace kpp

#endif
