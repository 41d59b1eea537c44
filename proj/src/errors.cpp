#include "maslovkit/errors.hpp"

namespace maslovkit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::NotInChart: return "not-in-chart error";
    case ErrorKind::ChartBoundary: return "chart-boundary error";
    case ErrorKind::Invariant: return "invariant violation";
    case ErrorKind::UndersampledLoop: return "undersampled loop";
    case ErrorKind::NonGeneric: return "non-generic input";
    case ErrorKind::TangentialCrossing: return "tangential crossing";
    case ErrorKind::NotImmersion: return "not an immersion";
    case ErrorKind::SingularMultiplier: return "singular multiplier";
    case ErrorKind::Convergence: return "convergence failure";
    case ErrorKind::Integration: return "integration failure";
    case ErrorKind::Inconclusive: return "inconclusive";
    case ErrorKind::Family: return "family error";
  }
  return "error";
}

}  // namespace maslovkit
