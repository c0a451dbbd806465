#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opsys {

enum class ErrorKind {
  NonHermitianInput,
  ShapeMismatch,
  EntryNotInSystem,
  NonContraction,
  NotAProjection,
  TrivialUnit,
  IllConditioned,
  EmptyFamily,
  NotADistribution,
  SignallingViolation,
  CommutationViolation,
  NotNonSignalling,
  InvalidState,
  SchemaError,
  InvariantViolation,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Location of a violated identity: which quantity, 1-based indices as they
// appear in files, and the size of the violation.
struct ViolationDetail {
  std::string quantity;
  std::vector<int> indices;
  double magnitude = 0.0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  Error(ErrorKind kind, const std::string& message, ViolationDetail detail)
      : Error(kind, message) {
    detail_ = std::move(detail);
    has_detail_ = true;
  }

  ErrorKind kind() const { return kind_; }
  bool has_detail() const { return has_detail_; }
  const ViolationDetail& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  ViolationDetail detail_;
  bool has_detail_ = false;
};

}  // namespace opsys
