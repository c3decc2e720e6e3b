#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pellip {

enum class ErrorKind {
  dimension,
  domain,
  not_elliptic,
  ill_conditioned,
  singular_symbol,
  accuracy,
  truncation,
  divergent_bound,
  grid_mismatch,
  config,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library. `value()` carries the quantity that
/// triggered the failure when there is one (achieved residual, condition
/// number, suggested truncation bound, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<double> value = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what),
        kind_(kind),
        value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  std::optional<double> value_;
};

}  // namespace pellip
