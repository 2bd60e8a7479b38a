#include "tsmix/dataset.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace tsmix {

DatasetShape dataset_shape_from_string(const std::string &name) {
  if (name == "sine")
    return DatasetShape::sine;
  if (name == "spiral")
    return DatasetShape::spiral;
  if (name == "loops" || name == "handwriting-like-loops")
    return DatasetShape::loops;
  throw ValidationError("unknown dataset shape '" + name + "' (expected sine|spiral|loops)");
}

Vec dataset_curve(DatasetShape shape, double t, Index dim, double amplitude) {
  constexpr double pi = std::numbers::pi;
  Vec x(dim);
  switch (shape) {
  case DatasetShape::sine:
    for (Index d = 0; d < dim; ++d)
      x(d) = amplitude * std::sin(2.0 * pi * t + static_cast<double>(d) * pi / 2.0);
    break;
  case DatasetShape::spiral: {
    const double r = amplitude * (0.2 + 0.8 * t);
    const double a = 4.0 * pi * t;
    for (Index d = 0; d < dim; ++d)
      x(d) = d == 0 ? r * std::cos(a) : d == 1 ? r * std::sin(a) : t;
    break;
  }
  case DatasetShape::loops: {
    const double a = 6.0 * pi * t;
    for (Index d = 0; d < dim; ++d)
      x(d) = d == 0   ? 2.0 * t - 1.0 - 0.3 * amplitude * std::sin(a)
             : d == 1 ? 0.3 * amplitude * std::cos(a) + 0.2 * std::sin(pi * t)
                      : 0.1 * static_cast<double>(d) * std::sin(a / 3.0);
    break;
  }
  }
  return x;
}

TrajectorySet generate_dataset(const DatasetConfig &c) {
  require(c.demos >= 1, "dataset needs M >= 1 demonstrations");
  require(c.steps >= 2, "dataset needs T >= 2 time steps");
  require(c.dim >= 1, "dataset needs D >= 1");
  require(std::isfinite(c.noise) && c.noise >= 0.0, "dataset noise must be >= 0");
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vec times = uniform_times(c.steps);
  TrajectorySet out;
  for (Index m = 0; m < c.demos; ++m) {
    double amplitude = 1.0;
    if (c.noise > 0.0 && c.shape != DatasetShape::sine)
      amplitude += c.noise * normal(rng);
    Trajectory traj;
    traj.times = times;
    traj.values.resize(c.steps, c.dim);
    for (Index i = 0; i < c.steps; ++i) {
      traj.values.row(i) = dataset_curve(c.shape, times(i), c.dim, amplitude).transpose();
      if (c.noise > 0.0)
        for (Index d = 0; d < c.dim; ++d)
          traj.values(i, d) += c.noise * normal(rng);
    }
    out.push_back(std::move(traj));
  }
  return out;
}

} // namespace tsmix
