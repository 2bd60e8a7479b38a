#include "tsmix/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tsmix::io {

namespace {

json vec_json(const Vec &v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i)
    a.push_back(v(i));
  return a;
}

json mat_json(const Mat &m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

Vec json_vec(const json &j, const char *what) {
  if (!j.is_array())
    throw ValidationError(std::string(what) + " must be an array of numbers");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ValidationError(std::string(what) + " must be an array of numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

Mat json_mat(const json &j, const char *what) {
  if (!j.is_array() || j.empty())
    throw ValidationError(std::string(what) + " must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Mat m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Vec row = json_vec(j[static_cast<std::size_t>(r)], what);
    if (row.size() != cols)
      throw ValidationError(std::string(what) + " has ragged rows");
    m.row(r) = row.transpose();
  }
  return m;
}

void check_version(const json &j, const std::string &version) {
  if (!j.is_object() || !j.contains("version") || j["version"] != version)
    throw ValidationError("expected a '" + version + "' document");
}

template <typename T> T field(const json &j, const char *key) {
  if (!j.contains(key))
    throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

const json &node(const json &j, const char *key) {
  if (!j.contains(key))
    throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

} // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

json to_json(const Gaussian &g) { return {{"mean", vec_json(g.mean())}, {"cov", mat_json(g.cov())}}; }

Gaussian gaussian_from_json(const json &j) {
  return Gaussian(json_vec(node(j, "mean"), "mean"), json_mat(node(j, "cov"), "cov"));
}

json to_json(const MixtureModel &m) {
  json comps = json::array();
  for (const auto &c : m.components())
    comps.push_back(to_json(c));
  return {{"version", "gmm-v1"}, {"dim", m.dim()}, {"priors", vec_json(m.priors())}, {"components", comps}};
}

MixtureModel mixture_from_json(const json &j) {
  check_version(j, "gmm-v1");
  const auto dim = field<Index>(j, "dim");
  std::vector<Gaussian> comps;
  for (const auto &c : node(j, "components"))
    comps.push_back(gaussian_from_json(c));
  MixtureModel m(json_vec(node(j, "priors"), "priors"), std::move(comps));
  if (m.dim() != dim)
    throw ValidationError("gmm-v1 'dim' does not match the components");
  return m;
}

json to_json(const LwrModel &m) {
  json centers = json::array(), bands = json::array(), coeffs = json::array();
  for (const auto &c : m.rbfs().centers())
    centers.push_back(vec_json(c));
  for (const auto &b : m.rbfs().bandwidths())
    bands.push_back(mat_json(b));
  for (const auto &a : m.coefficients())
    coeffs.push_back(mat_json(a));
  return {{"version", "lwr-v1"},   {"degree", m.degree()},  {"rescaled", m.rbfs().rescaled()},
          {"centers", centers},    {"bandwidths", bands},   {"coefficients", coeffs},
          {"features", "local"}};
}

LwrModel lwr_from_json(const json &j) {
  check_version(j, "lwr-v1");
  std::vector<Vec> centers;
  std::vector<Mat> bands, coeffs;
  for (const auto &c : node(j, "centers"))
    centers.push_back(json_vec(c, "centers"));
  for (const auto &b : node(j, "bandwidths"))
    bands.push_back(json_mat(b, "bandwidths"));
  for (const auto &a : node(j, "coefficients"))
    coeffs.push_back(json_mat(a, "coefficients"));
  return LwrModel(RbfSet(std::move(centers), std::move(bands), field<bool>(j, "rescaled")),
                  std::move(coeffs), field<int>(j, "degree"));
}

json to_json(const BezierCurve &c) {
  return {{"version", "bezier-v1"}, {"dim", c.dim()}, {"degree", c.degree()},
          {"control_points", mat_json(c.control_points())}};
}

BezierCurve bezier_from_json(const json &j) {
  check_version(j, "bezier-v1");
  return BezierCurve(json_mat(node(j, "control_points"), "control_points"));
}

json to_json(const BasisFamily &f) {
  json j = {{"kind", to_string(f.kind)}, {"count", f.count}};
  if (f.kind == BasisKind::radial) {
    j["centers"] = f.centers;
    j["bandwidth"] = f.bandwidth;
    j["rescaled"] = f.rescaled;
  } else if (f.kind == BasisKind::fourier) {
    j["period"] = f.period;
  }
  return j;
}

BasisFamily basis_family_from_json(const json &j) {
  BasisFamily f;
  f.kind = basis_kind_from_string(field<std::string>(j, "kind"));
  f.count = field<int>(j, "count");
  if (f.kind == BasisKind::radial) {
    f.centers = field<std::vector<double>>(j, "centers");
    f.bandwidth = field<double>(j, "bandwidth");
    f.rescaled = field<bool>(j, "rescaled");
  } else if (f.kind == BasisKind::fourier) {
    f.period = field<double>(j, "period");
  }
  f.validate();
  return f;
}

json to_json(const ProMP &p) {
  return {{"version", "promp-v1"}, {"family", to_json(p.family())}, {"T", p.steps()},
          {"D", p.dim()},          {"mu_w", vec_json(p.mu_w())},   {"sigma_w", mat_json(p.sigma_w())},
          {"sigma2", p.sigma2()}};
}

ProMP promp_from_json(const json &j) {
  check_version(j, "promp-v1");
  return ProMP(basis_family_from_json(node(j, "family")), field<Index>(j, "T"), field<Index>(j, "D"),
               json_vec(node(j, "mu_w"), "mu_w"), json_mat(node(j, "sigma_w"), "sigma_w"),
               field<double>(j, "sigma2"));
}

json to_json(const ProMPMixture &m) {
  return {{"version", "promp-mixture-v1"}, {"family", to_json(m.family)}, {"T", m.psi.steps},
          {"D", m.psi.dim}, {"weights", to_json(m.weights)}, {"sigma2", m.sigma2}};
}

ProMPMixture promp_mixture_from_json(const json &j) {
  check_version(j, "promp-mixture-v1");
  ProMPMixture m;
  m.family = basis_family_from_json(node(j, "family"));
  m.times = uniform_times(field<Index>(j, "T"));
  m.psi = build_psi(m.family, m.times, field<Index>(j, "D"));
  m.weights = mixture_from_json(node(j, "weights"));
  m.sigma2 = field<double>(j, "sigma2");
  if (m.weights.dim() != m.psi.values.cols())
    throw ValidationError("promp-mixture-v1 weight dimension does not match the basis");
  return m;
}

std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out)
    throw ValidationError("failed writing '" + path + "'");
}

json read_json(const std::string &path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error &e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

namespace {

std::vector<std::string> split_line(const std::string &line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ','))
    cells.push_back(cell);
  if (!line.empty() && line.back() == ',')
    cells.emplace_back();
  return cells;
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

CsvTable parse_csv(std::istream &in, const std::string &source) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = trim(line);
    if (trimmed.empty())
      continue;
    auto cells = split_line(trimmed);
    if (!have_header) {
      for (auto &c : cells)
        t.header.push_back(trim(c));
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header.size()) + " fields, found " +
                            std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto &raw : cells) {
      const std::string c = trim(raw);
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (c.empty() || res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw ValidationError(source + ":" + std::to_string(lineno) + ": '" + c + "' is not a number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
    t.lines.push_back(lineno);
  }
  if (!have_header)
    throw ValidationError(source + ": missing CSV header");
  return t;
}

CsvTable read_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

Mat to_matrix(const CsvTable &table) {
  Mat m(static_cast<Index>(table.rows.size()), static_cast<Index>(table.header.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < table.header.size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = table.rows[r][c];
  return m;
}

TrajectoryFile parse_trajectory_csv(const CsvTable &table, const std::string &source) {
  const auto &h = table.header;
  if (h.size() < 3 || h[0] != "traj_id" || h[1] != "t")
    throw ValidationError(source + ":1: trajectory header must be traj_id,t,x1,...,xD");
  for (std::size_t c = 2; c < h.size(); ++c)
    if (h[c] != "x" + std::to_string(c - 1))
      throw ValidationError(source + ":1: expected column 'x" + std::to_string(c - 1) + "', found '" +
                            h[c] + "'");
  TrajectoryFile f;
  f.dim = static_cast<Index>(h.size() - 2);
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double id = table.rows[r][0];
    const std::string where = source + ":" + std::to_string(table.lines[r]) + ": ";
    if (id != std::floor(id) || id < 0 || id > 1e9)
      throw ValidationError(where + "traj_id must be a nonnegative integer");
    auto &g = groups[static_cast<int>(id)];
    if (!g.empty() && !(table.rows[r][1] > table.rows[g.back()][1]))
      throw ValidationError(where + "time stamps must be strictly increasing within a trajectory");
    g.push_back(r);
  }
  for (const auto &[id, rows] : groups) {
    Trajectory t;
    t.times.resize(static_cast<Index>(rows.size()));
    t.values.resize(static_cast<Index>(rows.size()), f.dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      t.times(static_cast<Index>(i)) = table.rows[rows[i]][1];
      for (Index d = 0; d < f.dim; ++d)
        t.values(static_cast<Index>(i), d) = table.rows[rows[i]][static_cast<std::size_t>(d + 2)];
    }
    f.ids.push_back(id);
    f.demos.push_back(std::move(t));
  }
  return f;
}

TrajectoryFile read_trajectory_csv(const std::string &path) {
  return parse_trajectory_csv(read_csv(path), path);
}

std::string trajectory_csv(const TrajectorySet &demos, const std::vector<int> &ids) {
  std::ostringstream s;
  const Index dim = demos.empty() ? 1 : demos.front().values.cols();
  s << "traj_id,t";
  for (Index d = 0; d < dim; ++d)
    s << ",x" << d + 1;
  s << '\n';
  for (std::size_t m = 0; m < demos.size(); ++m) {
    const int id = ids.empty() ? static_cast<int>(m) : ids[m];
    const auto &t = demos[m];
    for (Index i = 0; i < t.times.size(); ++i) {
      s << id << ',' << format_double(t.times(i));
      for (Index d = 0; d < dim; ++d)
        s << ',' << format_double(t.values(i, d));
      s << '\n';
    }
  }
  return s.str();
}

std::string csv(const std::vector<std::string> &header, const Mat &rows) {
  std::ostringstream s;
  for (std::size_t c = 0; c < header.size(); ++c)
    s << (c ? "," : "") << header[c];
  s << '\n';
  for (Index r = 0; r < rows.rows(); ++r) {
    for (Index c = 0; c < rows.cols(); ++c)
      s << (c ? "," : "") << format_double(rows(r, c));
    s << '\n';
  }
  return s.str();
}

std::string coeffs_csv(const FourierDomain &dom, const std::vector<std::string> &names,
                       const std::vector<CoeffArray> &columns) {
  std::ostringstream s;
  s << "index";
  for (int d = 0; d < dom.dim(); ++d)
    s << ",k" << d + 1;
  for (const auto &n : names)
    s << ',' << n;
  s << '\n';
  for (Index f = 0; f < dom.size(); ++f) {
    const auto k = dom.index(f);
    s << f;
    for (int d = 0; d < dom.dim(); ++d)
      s << ',' << k(d);
    for (const auto &c : columns)
      s << ',' << format_double(c(f));
    s << '\n';
  }
  return s.str();
}

} // namespace tsmix::io
