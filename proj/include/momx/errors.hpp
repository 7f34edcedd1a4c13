#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace momx {

enum class ErrorKind {
  InputError,
  IndexOutOfRange,
  NotPsd,
  NegativeDenominator,
  InconsistentShift,
  DomainCollapse,
  SingularShift,
  FixedPoint,
  NotUnitary,
  ContractionViolated,
  EmbeddingLost,
  NotDirectSum,
  NoDecomposition,
  NotSupported,
  SingularMatrix,
  CommutationViolated,
  ExcludedPoint,
  AdmissibilityFailed,
  PointMismatch,
  StructureViolation,
  NotSelfAdjointA2,
  ClusterAmbiguity,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace momx
