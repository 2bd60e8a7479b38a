#pragma once

#include <string>
#include <vector>

#include "tsmix/promp.hpp"

namespace tsmix::plot {

enum class PlotKind { trajectory, coeff_heatmap, basis_functions, covariance_matrix };

PlotKind plot_kind_from_string(const std::string &name);

/// Paths in the (x1, x2) plane, or x1 against t for 1-D data. An empty set
/// still produces the frame and axes.
std::string trajectory_svg(const TrajectorySet &demos, const std::string &title = "trajectory");

/// rows x cols grid of colored cells; one <rect> per cell.
std::string heatmap_svg(const Mat &grid, const std::string &title);

/// phi is T x K (one column per basis function). The document embeds a
/// <desc id="partition-of-unity"> element holding the largest deviation of
/// the row sums from 1.
std::string basis_svg(const Vec &times, const Mat &phi, const std::string &title = "basis functions");

/// Largest |sum_k phi(t, k) - 1| over the rows of phi.
double partition_of_unity_deviation(const Mat &phi);

} // namespace tsmix::plot
