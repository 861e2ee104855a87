#pragma once

#include <stdexcept>
#include <string>

namespace dsp {

// Malformed or out-of-range inputs: files, strings, parameters. CLI exit 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Physical or numerical failure during simulation or estimation, e.g.
// "post-selection starved" or "purification denominator vanished". CLI exit 3.
struct SimulationError : std::runtime_error {
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dsp
