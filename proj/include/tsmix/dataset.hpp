#pragma once

#include <cstdint>
#include <string>

#include "tsmix/promp.hpp"

namespace tsmix {

enum class DatasetShape { sine, spiral, loops };

DatasetShape dataset_shape_from_string(const std::string &name);

struct DatasetConfig {
  DatasetShape shape = DatasetShape::sine;
  Index demos = 5;
  Index steps = 100;
  Index dim = 2;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Noise-free value of a shape at time t in [0, 1]. amplitude scales the
/// shape (1 for the nominal curve).
Vec dataset_curve(DatasetShape shape, double t, Index dim, double amplitude = 1.0);

/// M demonstrations on uniform times in [0, 1]. With noise > 0 each demo
/// gets a random amplitude factor 1 + noise * z and i.i.d. Gaussian
/// perturbations of standard deviation noise. The sine shape keeps unit
/// amplitude so that noise = 0 gives exact sine values.
TrajectorySet generate_dataset(const DatasetConfig &config);

} // namespace tsmix
