#pragma once

#include <string>

#include "fatra/model.hpp"

namespace fatra {

// Flat text checkpoint: a header with shapes and hyperparameters, then one
// row-major weight payload per network layer (17 significant digits, exact
// double round-trip). Optimizer state is not persisted.
void save_checkpoint(const FatraModel& m, const std::string& path);
FatraModel load_checkpoint(const std::string& path);

}  // namespace fatra
