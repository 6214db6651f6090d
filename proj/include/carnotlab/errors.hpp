#ifndef CARNOTLAB_ERRORS_HPP
#define CARNOTLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace carnotlab {

// Thrown when a computation would exceed a memory or size guard.
// CLI maps this to its own exit code, distinct from domain errors.
class GuardError : public std::runtime_error {
public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid mathematical input (dimension mismatch, parameter out of range,
// missing function values, ...). CLI exit code 3.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace carnotlab

#endif
