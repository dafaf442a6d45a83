#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crq/operators.hpp"

namespace crq {

struct Preset {
  std::string name;
  std::string description;
  SpectralField w;
  SpectralField lambda0;
};

/// sphere-trivial, sphere-mode11, conformal-c03.
std::vector<std::string> preset_names();

/// Throws std::invalid_argument for unknown names.
Preset make_preset(std::string_view name, const SpectralSpace& space);

}  // namespace crq
