#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsdi {

// Error taxonomy. Invalid arguments use std::invalid_argument directly.

/// Malformed cross-section table; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Photon energies not strictly increasing.
class OrderingError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Value outside its physical domain (negative sigma, energy below threshold, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A cross-section curve was queried beyond its last tabulated node.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(double photon_energy, const std::string& what)
      : std::runtime_error(what), photon_energy_(photon_energy) {}
  /// Offending photon energy in hartree.
  double photon_energy() const noexcept { return photon_energy_; }

 private:
  double photon_energy_;
};

class InvalidModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Photon energy outside the open nonsequential window ((I_A + I_B)/2, I_B).
class WindowError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Norm drift during propagation exceeded the stability limit.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsdi
