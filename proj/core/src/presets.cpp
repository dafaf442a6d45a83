#include "crq/presets.hpp"

#include <stdexcept>

#include "crq/background.hpp"

namespace crq {

std::vector<std::string> preset_names() { return {"sphere-trivial", "sphere-mode11", "conformal-c03"}; }

Preset make_preset(std::string_view name, const SpectralSpace& space) {
  const int n = space.truncation();
  const SpectralField zero = SpectralField::zero(n);
  if (name == "sphere-trivial") return {std::string(name), "w = 0, lambda0 = 0", zero, zero};
  if (n < 2) throw std::invalid_argument("preset '" + std::string(name) + "' needs N >= 2");
  if (name == "sphere-mode11") {
    return {std::string(name), "w = 0, lambda0 = 0.1 u11", zero, mode_field(space, mode11(), 0.1)};
  }
  if (name == "conformal-c03") {
    return {std::string(name), "w = 0.3 u11, lambda0 = 0", mode_field(space, mode11(), 0.3), zero};
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace crq
