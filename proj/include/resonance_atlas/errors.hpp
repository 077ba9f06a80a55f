#pragma once

#include <stdexcept>
#include <string>

namespace resonance_atlas {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance.  `estimate` carries
/// the best value achieved and `error_estimate` its error bound, when known.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what, double estimate = 0.0,
                          double error_estimate = 0.0)
      : std::runtime_error(what), estimate_(estimate), error_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_; }

private:
  double estimate_;
  double error_;
};

/// A zero of the integrand sits on (or too close to) a contour edge.
class BoundaryConflict : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// A value left the representable range of the requested floating type.
class OverflowError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Runs f and rethrows any library error with `prefix` prepended to the
/// message, keeping the exception type.
template <class F>
decltype(auto) with_context(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const OverflowError& e) {
    throw OverflowError(prefix + ": " + e.what(), e.estimate(), e.error_estimate());
  } catch (const BoundaryConflict& e) {
    throw BoundaryConflict(prefix + ": " + e.what(), e.estimate(), e.error_estimate());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + ": " + e.what(), e.estimate(), e.error_estimate());
  } catch (const DomainError& e) {
    throw DomainError(prefix + ": " + e.what());
  }
}

} // namespace resonance_atlas
