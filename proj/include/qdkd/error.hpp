#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdkd {

enum class ErrorKind {
  invalid_basis_label,
  mode_collision,
  unknown_mode,
  dimension_mismatch,
  not_normalized,
  not_unitary,
  not_observable,
  bad_mixture,
  forbidden_mode,
  bad_param,
  undefined,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_basis_label: return "InvalidBasisLabel";
    case ErrorKind::mode_collision: return "ModeCollision";
    case ErrorKind::unknown_mode: return "UnknownMode";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::not_normalized: return "NotNormalized";
    case ErrorKind::not_unitary: return "NotUnitary";
    case ErrorKind::not_observable: return "NotObservable";
    case ErrorKind::bad_mixture: return "BadMixture";
    case ErrorKind::forbidden_mode: return "ForbiddenMode";
    case ErrorKind::bad_param: return "BadParam";
    case ErrorKind::undefined: return "Undefined";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qdkd
