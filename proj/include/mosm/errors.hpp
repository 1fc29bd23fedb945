#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mosm {

/// Krylov iteration did not reach the requested tolerance.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double final_residual, int iterations,
                std::optional<std::size_t> direction_index = std::nullopt)
      : std::runtime_error(what),
        final_residual_(final_residual),
        iterations_(iterations),
        direction_index_(direction_index) {}

  double final_residual() const noexcept { return final_residual_; }
  int iterations() const noexcept { return iterations_; }
  std::optional<std::size_t> direction_index() const noexcept { return direction_index_; }

 private:
  double final_residual_;
  int iterations_;
  std::optional<std::size_t> direction_index_;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input is well-formed line by line but inconsistent as a whole
/// (missing records, wrong counts, column map mismatch).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every eigenvalue of Im F fell below the truncation threshold.
class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mosm
