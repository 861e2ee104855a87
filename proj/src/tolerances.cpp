#include "dsp/tolerances.hpp"

namespace dsp {

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

const SimLimits& default_limits() {
  static const SimLimits limits{};
  return limits;
}

}  // namespace dsp
