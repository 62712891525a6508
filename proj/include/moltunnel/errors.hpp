#pragma once

#include <stdexcept>
#include <string>

namespace moltunnel {

/// Invalid physical input (non-positive mass, energy below threshold, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The numerical result failed an internal accuracy check.
class accuracy_error : public std::runtime_error {
 public:
  accuracy_error(const std::string& what, double defect)
      : std::runtime_error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// An operation was called on input outside its supported class
/// (e.g. background-phase extraction for an asymmetric barrier).
class unsupported_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Root bracketing, eigenvalue search or phase unwrapping failed.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, int index = -1)
      : std::runtime_error(what), index_(index) {}
  /// Offending level / resonance index, -1 when not applicable.
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// A point or iteration budget ran out before the requested resolution.
class budget_exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace moltunnel
