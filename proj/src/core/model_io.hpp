#pragma once

#include <string>

#include "core/density.hpp"

namespace hcr {

// Self-describing versioned text form of a fitted model. Doubles are written
// with shortest round-trip precision, so save followed by load reproduces the
// model bit for bit.
std::string model_to_text(const DensityModel& model);
DensityModel model_from_text(const std::string& text);

void save_model(const DensityModel& model, const std::string& path);
DensityModel load_model(const std::string& path);

}  // namespace hcr
