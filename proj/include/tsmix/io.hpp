#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "tsmix/bezier.hpp"
#include "tsmix/ergodic.hpp"
#include "tsmix/gaussians.hpp"
#include "tsmix/lwr.hpp"
#include "tsmix/promp.hpp"

namespace tsmix::io {

using json = nlohmann::json;

/// Shortest representation that round-trips exactly.
std::string format_double(double value);

// Model files. Every document carries a "version" tag that readers check.
json to_json(const MixtureModel &m);             // "gmm-v1"
MixtureModel mixture_from_json(const json &j);
json to_json(const LwrModel &m);                 // "lwr-v1"
LwrModel lwr_from_json(const json &j);
json to_json(const BezierCurve &c);              // "bezier-v1"
BezierCurve bezier_from_json(const json &j);
json to_json(const BasisFamily &f);
BasisFamily basis_family_from_json(const json &j);
json to_json(const ProMP &p);                    // "promp-v1"
ProMP promp_from_json(const json &j);
json to_json(const ProMPMixture &m);             // "promp-mixture-v1"
ProMPMixture promp_mixture_from_json(const json &j);
json to_json(const Gaussian &g);
Gaussian gaussian_from_json(const json &j);

std::string read_text(const std::string &path);
void write_text(const std::string &path, const std::string &text);
json read_json(const std::string &path);
/// Indented dump with a trailing newline.
std::string dump(const json &j);

/// Numeric CSV with a mandatory header. Errors name the source and line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row
};
CsvTable parse_csv(std::istream &in, const std::string &source);
CsvTable read_csv(const std::string &path);
Mat to_matrix(const CsvTable &table);

/// Trajectory CSV: header traj_id,t,x1..xD; t strictly increasing within an
/// id; constant D. Demonstrations are returned in ascending id order.
struct TrajectoryFile {
  std::vector<int> ids;
  TrajectorySet demos;
  Index dim = 0;
};
TrajectoryFile parse_trajectory_csv(const CsvTable &table, const std::string &source);
TrajectoryFile read_trajectory_csv(const std::string &path);
std::string trajectory_csv(const TrajectorySet &demos, const std::vector<int> &ids = {});

/// Generic CSV writer for a header plus numeric rows.
std::string csv(const std::vector<std::string> &header, const Mat &rows);

/// index,k1..kD,<columns...>
std::string coeffs_csv(const FourierDomain &dom, const std::vector<std::string> &names,
                       const std::vector<CoeffArray> &columns);

} // namespace tsmix::io
