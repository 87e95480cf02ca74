#include "psloc/estimators.hpp"

namespace psloc {

const char* to_string(EstimatorLabel label) noexcept {
  switch (label) {
    case EstimatorLabel::MLE: return "mle";
    case EstimatorLabel::BE: return "be";
    case EstimatorLabel::LSE: return "lse";
    case EstimatorLabel::OneStepProcess: return "onestep_process";
    case EstimatorLabel::OneStep: return "onestep";
  }
  return "unknown";
}

const char* to_string(OneStepStatus status) noexcept {
  switch (status) {
    case OneStepStatus::Ok: return "ok";
    case OneStepStatus::PreArrival: return "pre_arrival";
    case OneStepStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace psloc
