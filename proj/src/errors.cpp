#include "momx/errors.hpp"

namespace momx {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputError: return "InputError";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::NegativeDenominator: return "NegativeDenominator";
    case ErrorKind::InconsistentShift: return "InconsistentShift";
    case ErrorKind::DomainCollapse: return "DomainCollapse";
    case ErrorKind::SingularShift: return "SingularShift";
    case ErrorKind::FixedPoint: return "FixedPoint";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::ContractionViolated: return "ContractionViolated";
    case ErrorKind::EmbeddingLost: return "EmbeddingLost";
    case ErrorKind::NotDirectSum: return "NotDirectSum";
    case ErrorKind::NoDecomposition: return "NoDecomposition";
    case ErrorKind::NotSupported: return "NotSupported";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::CommutationViolated: return "CommutationViolated";
    case ErrorKind::ExcludedPoint: return "ExcludedPoint";
    case ErrorKind::AdmissibilityFailed: return "AdmissibilityFailed";
    case ErrorKind::PointMismatch: return "PointMismatch";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::NotSelfAdjointA2: return "NotSelfAdjointA2";
    case ErrorKind::ClusterAmbiguity: return "ClusterAmbiguity";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace momx
