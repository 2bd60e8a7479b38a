#include "tsmix/cli.hpp"

#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>

#include "CLI11.hpp"

#include "tsmix/dataset.hpp"
#include "tsmix/gmr.hpp"
#include "tsmix/io.hpp"
#include "tsmix/plot.hpp"

namespace tsmix {

namespace {

using io::json;

struct Common {
  std::uint64_t seed = 0;
  std::string output;
  std::string format;
  bool quiet = false;
  std::string diagnostics;
};

struct Context {
  Common opt;
  std::ostream &out;
  std::ostream &err;
  json diag = json::object();

  void emit(const std::string &text) const {
    if (opt.output.empty() || opt.output == "-")
      out << text;
    else
      io::write_text(opt.output, text);
  }

  bool json_format() const { return opt.format == "json"; }

  void model_only() const {
    if (!opt.format.empty() && opt.format != "json")
      throw ValidationError("this command writes a JSON model; --format csv is not available");
  }
};

struct Table {
  std::vector<std::string> header;
  Mat rows;
};

std::string encode(const Table &t, const Context &ctx) {
  if (!ctx.json_format())
    return io::csv(t.header, t.rows);
  json rows = json::array();
  for (Index r = 0; r < t.rows.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < t.rows.cols(); ++c)
      row.push_back(t.rows(r, c));
    rows.push_back(row);
  }
  return io::dump({{"columns", t.header}, {"rows", rows}});
}

std::vector<std::string> numbered(const std::string &prefix, Index n) {
  std::vector<std::string> names;
  for (Index i = 0; i < n; ++i)
    names.push_back(prefix + std::to_string(i + 1));
  return names;
}

void append(std::vector<std::string> &a, const std::vector<std::string> &b) {
  a.insert(a.end(), b.begin(), b.end());
}

/// Numeric CSV as rows of points; a leading traj_id column is dropped.
Mat load_points(const std::string &path) {
  const auto table = io::read_csv(path);
  Mat m = io::to_matrix(table);
  if (!table.header.empty() && table.header.front() == "traj_id")
    m = m.rightCols(m.cols() - 1).eval();
  require(m.rows() > 0, path + ": no data rows");
  return m;
}

/// lo:hi:n for a 1-D query grid.
Mat parse_grid(const std::string &text) {
  double lo = 0, hi = 0;
  long n = 0;
  const auto a = text.find(':'), b = text.rfind(':');
  bool ok = a != std::string::npos && b != a;
  if (ok) {
    const char *s = text.data();
    ok = std::from_chars(s, s + a, lo).ptr == s + a &&
         std::from_chars(s + a + 1, s + b, hi).ptr == s + b &&
         std::from_chars(s + b + 1, s + text.size(), n).ptr == s + text.size();
  }
  if (!ok || n < 1 || !(hi >= lo))
    throw ValidationError("--grid expects lo:hi:n with lo <= hi and n >= 1, got '" + text + "'");
  return n == 1 ? Mat::Constant(1, 1, lo) : Mat(Vec::LinSpaced(n, lo, hi));
}

Mat load_queries(const std::string &path, const std::string &grid, Index dim) {
  if (path.empty() == grid.empty())
    throw ValidationError("give exactly one of --queries and --grid");
  Mat q = path.empty() ? parse_grid(grid) : load_points(path);
  if (q.cols() != dim)
    throw ValidationError("queries have " + std::to_string(q.cols()) + " columns, the model expects " +
                          std::to_string(dim));
  return q;
}

Mat select_columns(const Mat &m, const std::vector<int> &cols, const char *what) {
  Mat out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= m.cols())
      throw ValidationError(std::string(what) + " index " + std::to_string(cols[j]) + " is out of range");
    out.col(static_cast<Index>(j)) = m.col(cols[j]);
  }
  return out;
}

Table trajectory_table(const TrajectorySet &demos, const std::vector<int> &ids = {}) {
  const Index dim = demos.empty() ? 1 : demos.front().values.cols();
  Table t{{"traj_id", "t"}, {}};
  append(t.header, numbered("x", dim));
  Index rows = 0;
  for (const auto &d : demos)
    rows += d.times.size();
  t.rows.resize(rows, dim + 2);
  Index r = 0;
  for (std::size_t m = 0; m < demos.size(); ++m)
    for (Index i = 0; i < demos[m].times.size(); ++i, ++r) {
      t.rows(r, 0) = ids.empty() ? static_cast<double>(m) : ids[m];
      t.rows(r, 1) = demos[m].times(i);
      t.rows.row(r).tail(dim) = demos[m].values.row(i);
    }
  return t;
}

struct BasisOptions {
  std::string kind = "radial";
  int count = 5;
  double bandwidth = 0.0;
  bool unnormalized = false;
  double period = 2.0;

  BasisFamily family() const {
    switch (basis_kind_from_string(kind)) {
    case BasisKind::radial:
      return BasisFamily::radial(count, bandwidth, !unnormalized);
    case BasisKind::bernstein:
      return BasisFamily::bernstein(count);
    case BasisKind::fourier:
      return BasisFamily::fourier(count, period);
    }
    throw ValidationError("unknown basis");
  }
};

void add_basis_options(CLI::App *c, BasisOptions &b) {
  c->add_option("--basis", b.kind, "radial|bernstein|fourier")->capture_default_str();
  c->add_option("-K,--K", b.count, "number of basis functions")->capture_default_str();
  c->add_option("--bandwidth", b.bandwidth, "RBF variance; 0 selects (1/K)^2")->capture_default_str();
  c->add_flag("--unnormalized", b.unnormalized, "do not rescale RBF activations");
  c->add_option("--period", b.period, "period of the cosine basis")->capture_default_str();
}

EmInit parse_init(const std::string &s) {
  if (s == "binning")
    return EmInit::binning;
  if (s == "kmeans++" || s == "kmeans_pp")
    return EmInit::kmeans_pp;
  throw ValidationError("unknown EM initialization '" + s + "' (expected binning|kmeans++)");
}

json em_diagnostics(const EmDiagnostics &d) {
  return {{"log_likelihood", d.log_likelihood},
          {"iterations", d.iterations},
          {"converged", d.converged},
          {"reseed_iterations", d.reseed_iterations}};
}

std::filesystem::path resolve_near(const std::string &config_path, const std::string &path) {
  std::filesystem::path p(path);
  if (p.is_relative())
    p = std::filesystem::path(config_path).parent_path() / p;
  return p;
}

Vec json_vector(const json &j, const char *what) {
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

template <typename T> T config_value(const json &cfg, const char *key) {
  if (!cfg.contains(key))
    throw ValidationError(std::string("config is missing '") + key + "'");
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception &) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

Mat heatmap_grid(const io::CsvTable &table, const std::string &column) {
  std::vector<std::size_t> kcols;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c].size() > 1 && table.header[c][0] == 'k' &&
        table.header[c].find_first_not_of("0123456789", 1) == std::string::npos)
      kcols.push_back(c);
  if (kcols.empty() || kcols.size() > 2)
    throw ValidationError("coeff-heatmap needs a coefficient CSV with one or two k columns");
  std::size_t vcol = table.header.size() - 1;
  if (!column.empty()) {
    const auto it = std::find(table.header.begin(), table.header.end(), column);
    if (it == table.header.end())
      throw ValidationError("no column named '" + column + "'");
    vcol = static_cast<std::size_t>(it - table.header.begin());
  }
  Index rows = 1, cols = 1;
  for (const auto &r : table.rows) {
    rows = std::max<Index>(rows, kcols.size() == 2 ? static_cast<Index>(r[kcols[0]]) + 1 : 1);
    cols = std::max<Index>(cols, static_cast<Index>(r[kcols.back()]) + 1);
  }
  Mat grid = Mat::Zero(rows, cols);
  for (const auto &r : table.rows)
    grid(kcols.size() == 2 ? static_cast<Index>(r[kcols[0]]) : 0, static_cast<Index>(r[kcols.back()])) =
        r[vcol];
  return grid;
}

} // namespace

ViaSpec parse_via(const std::string &text) {
  const auto colon = text.find(':'), eq = text.find('='), at = text.find('@');
  const auto bad = [&] {
    return ValidationError("--via expects t_index:dim=value@noise, got '" + text + "'");
  };
  if (colon == std::string::npos || eq == std::string::npos || at == std::string::npos ||
      !(colon < eq && eq < at))
    throw bad();
  ViaSpec v{};
  const char *s = text.data();
  if (std::from_chars(s, s + colon, v.time_index).ptr != s + colon ||
      std::from_chars(s + colon + 1, s + eq, v.dim).ptr != s + eq ||
      std::from_chars(s + eq + 1, s + at, v.value).ptr != s + at ||
      std::from_chars(s + at + 1, s + text.size(), v.noise).ptr != s + text.size())
    throw bad();
  if (v.time_index < 0 || v.dim < 0)
    throw bad();
  if (!(v.noise >= 0.0))
    throw ValidationError("--via noise must be >= 0");
  return v;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Time-series encoding with basis functions and Gaussian mixtures", "tsmix"};
  app.require_subcommand(1);
  Context ctx{{}, out, err};
  std::map<const CLI::App *, std::function<void()>> handlers;
  std::string command;

  const auto add_common = [&](CLI::App *c, bool out_is_path) {
    c->add_option("--seed", ctx.opt.seed, "random seed")->capture_default_str();
    c->add_option(out_is_path ? "-o,--output,--out" : "-o,--output", ctx.opt.output,
                  "output path (stdout if omitted)");
    c->add_option("--format", ctx.opt.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    c->add_flag("--quiet", ctx.opt.quiet, "suppress warnings");
    c->add_option("--diagnostics", ctx.opt.diagnostics, "write JSON diagnostics to this path");
  };
  const auto leaf = [&](CLI::App *parent, const std::string &name, const std::string &help,
                        bool out_is_path = true) {
    auto *c = parent->add_subcommand(name, help);
    add_common(c, out_is_path);
    return c;
  };
  const auto group = [&](const std::string &name, const std::string &help) {
    auto *g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  };

  // gmm fit
  std::string data_path, model_path, queries_path, grid, init = "binning";
  int components = 2, max_iter = 500, degree = 1;
  double tol = 1e-10;
  auto *gmm = group("gmm", "Gaussian mixture models");
  auto *gmm_fit = leaf(gmm, "fit", "fit a GMM by EM");
  gmm_fit->add_option("--data", data_path, "numeric CSV, one point per row")->required();
  gmm_fit->add_option("-k,--components", components)->capture_default_str();
  gmm_fit->add_option("--init", init, "binning|kmeans++")->capture_default_str();
  gmm_fit->add_option("--tol", tol)->capture_default_str();
  gmm_fit->add_option("--max-iter", max_iter)->capture_default_str();
  handlers[gmm_fit] = [&] {
    ctx.model_only();
    EmConfig cfg{parse_init(init), tol, max_iter, ctx.opt.seed};
    const auto r = em_fit(load_points(data_path), components, cfg);
    ctx.emit(io::dump(io::to_json(r.model)));
    ctx.diag["em"] = em_diagnostics(r.diagnostics);
  };

  // gmr predict
  std::vector<int> in_dims, out_dims;
  auto *gmr = group("gmr", "Gaussian mixture regression");
  auto *gmr_predict = leaf(gmr, "predict", "conditional mean and covariance", false);
  gmr_predict->add_option("--model", model_path, "gmm-v1 JSON")->required();
  gmr_predict->add_option("--in", in_dims, "input dimensions")->delimiter(',')->required();
  gmr_predict->add_option("--out", out_dims, "output dimensions")->delimiter(',')->required();
  gmr_predict->add_option("--queries", queries_path, "numeric CSV of inputs");
  gmr_predict->add_option("--grid", grid, "lo:hi:n (1-D input)");
  handlers[gmr_predict] = [&] {
    const auto joint = io::mixture_from_json(io::read_json(model_path));
    const GmrRegressor reg(joint, DimensionSplit(in_dims, out_dims, joint.dim()));
    const Mat q = load_queries(queries_path, grid, reg.input_dim());
    const auto batch = reg.predict(q);
    const Index o = reg.output_dim();
    Table t{numbered("q", q.cols()), Mat(q.rows(), q.cols() + o + o * o)};
    append(t.header, numbered("mean", o));
    for (Index a = 0; a < o; ++a)
      for (Index b = 0; b < o; ++b)
        t.header.push_back("cov" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
    for (Index r = 0; r < q.rows(); ++r) {
      t.rows.row(r).head(q.cols()) = q.row(r);
      t.rows.row(r).segment(q.cols(), o) = batch.means.row(r);
      for (Index a = 0; a < o; ++a)
        for (Index b = 0; b < o; ++b)
          t.rows(r, q.cols() + o + a * o + b) = batch.covs[static_cast<std::size_t>(r)](a, b);
    }
    ctx.emit(encode(t, ctx));
    ctx.diag["queries"] = q.rows();
  };

  // lwr fit | predict
  int rbf_count = 5;
  bool unnormalized = false;
  double ridge = -1.0;
  auto *lwr = group("lwr", "locally weighted regression");
  auto *lwr_fit_cmd = leaf(lwr, "fit", "fit local polynomial models", false);
  lwr_fit_cmd->add_option("--data", data_path, "numeric CSV")->required();
  lwr_fit_cmd->add_option("--in", in_dims, "input column (one)")->delimiter(',')->required();
  lwr_fit_cmd->add_option("--out", out_dims, "output columns")->delimiter(',')->required();
  lwr_fit_cmd->add_option("-K,--K", rbf_count, "number of RBFs")->capture_default_str();
  lwr_fit_cmd->add_option("--degree", degree, "local polynomial degree")->capture_default_str();
  lwr_fit_cmd->add_flag("--unnormalized", unnormalized, "fit with unnormalized RBF weights");
  lwr_fit_cmd->add_option("--ridge", ridge, "Tikhonov term (default 1e-12 N)");
  handlers[lwr_fit_cmd] = [&] {
    ctx.model_only();
    require(in_dims.size() == 1, "lwr fit from the command line takes exactly one input column");
    const Mat data = load_points(data_path);
    const Mat x = select_columns(data, in_dims, "--in");
    const Mat y = select_columns(data, out_dims, "--out");
    const auto rbfs = RbfSet::uniform(x.minCoeff(), x.maxCoeff(), rbf_count, !unnormalized);
    const double lambda = ridge >= 0.0 ? ridge : default_lwr_ridge(x.rows());
    ctx.emit(io::dump(io::to_json(lwr_fit(x, y, rbfs, degree, lambda))));
    ctx.diag["ridge"] = lambda;
  };
  auto *lwr_predict_cmd = leaf(lwr, "predict", "evaluate a fitted LWR model");
  lwr_predict_cmd->add_option("--model", model_path, "lwr-v1 JSON")->required();
  lwr_predict_cmd->add_option("--queries", queries_path, "numeric CSV of inputs");
  lwr_predict_cmd->add_option("--grid", grid, "lo:hi:n (1-D input)");
  handlers[lwr_predict_cmd] = [&] {
    const auto model = io::lwr_from_json(io::read_json(model_path));
    const Mat q = load_queries(queries_path, grid, model.input_dim());
    const Mat y = model.predict_batch(q);
    Table t{numbered("q", q.cols()), Mat(q.rows(), q.cols() + y.cols())};
    append(t.header, numbered("y", y.cols()));
    t.rows << q, y;
    ctx.emit(encode(t, ctx));
  };

  // bezier eval | fit
  std::string curve_path, method = "de-casteljau";
  int samples = 100, traj_id = -1;
  bool clamp_ends = false;
  auto *bezier = group("bezier", "Bezier curves");
  auto *bezier_eval = leaf(bezier, "eval", "sample a curve on a uniform grid");
  bezier_eval->add_option("--curve", curve_path, "bezier-v1 JSON")->required();
  bezier_eval->add_option("--samples", samples)->capture_default_str();
  bezier_eval->add_option("--method", method, "de-casteljau|direct")->capture_default_str();
  handlers[bezier_eval] = [&] {
    require(samples >= 2, "--samples must be >= 2");
    BezierMethod m;
    if (method == "de-casteljau" || method == "de_casteljau")
      m = BezierMethod::de_casteljau;
    else if (method == "direct")
      m = BezierMethod::direct;
    else
      throw ValidationError("unknown --method '" + method + "'");
    const auto curve = io::bezier_from_json(io::read_json(curve_path));
    const Vec ts = Vec::LinSpaced(samples, 0.0, 1.0);
    Table t{{"t"}, Mat(samples, curve.dim() + 1)};
    append(t.header, numbered("x", curve.dim()));
    for (Index i = 0; i < samples; ++i) {
      t.rows(i, 0) = ts(i);
      t.rows.row(i).tail(curve.dim()) = curve.eval(ts(i), m).transpose();
    }
    ctx.emit(encode(t, ctx));
  };
  auto *bezier_fit_cmd = leaf(bezier, "fit", "least-squares control points for a trajectory");
  bezier_fit_cmd->add_option("--data", data_path, "trajectory CSV")->required();
  bezier_fit_cmd->add_option("--id", traj_id, "trajectory id (default: the first)");
  bezier_fit_cmd->add_option("--degree", degree)->capture_default_str();
  bezier_fit_cmd->add_flag("--clamp-ends", clamp_ends, "interpolate the first and last samples");
  handlers[bezier_fit_cmd] = [&] {
    ctx.model_only();
    const auto file = io::read_trajectory_csv(data_path);
    require(!file.demos.empty(), data_path + ": no trajectories");
    std::size_t idx = 0;
    if (traj_id >= 0) {
      const auto it = std::find(file.ids.begin(), file.ids.end(), traj_id);
      require(it != file.ids.end(), "no trajectory with id " + std::to_string(traj_id));
      idx = static_cast<std::size_t>(it - file.ids.begin());
    }
    const auto &d = file.demos[idx];
    ctx.emit(io::dump(io::to_json(bezier_fit(d.times, d.values, degree, clamp_ends))));
  };

  // fourier coeffs
  double period = 1.0;
  int per_dim = 10;
  auto *fourier = group("fourier", "Fourier series of Gaussian mixtures");
  auto *fourier_coeffs = leaf(fourier, "coeffs", "analytic coefficients of a mirrored GMM");
  fourier_coeffs->add_option("--model", model_path, "gmm-v1 JSON on [0, L/2]^D")->required();
  fourier_coeffs->add_option("--period", period, "period L")->capture_default_str();
  fourier_coeffs->add_option("-K,--K", per_dim, "coefficients per dimension")->capture_default_str();
  handlers[fourier_coeffs] = [&] {
    const auto m = io::mixture_from_json(io::read_json(model_path));
    const FourierDomain dom(period, static_cast<int>(m.dim()), per_dim);
    const auto w = gmm_coeffs(m, dom);
    if (ctx.json_format()) {
      json j = {{"period", period}, {"K", per_dim}, {"dim", m.dim()}, {"coeffs", json::array()}};
      for (Index f = 0; f < w.size(); ++f)
        j["coeffs"].push_back(w(f));
      ctx.emit(io::dump(j));
    } else {
      ctx.emit(io::coeffs_csv(dom, {"value"}, {w}));
    }
  };

  // ergodic simulate
  std::string config_path, coeffs_path, plot_path;
  auto *ergodic = group("ergodic", "ergodic exploration");
  auto *ergodic_sim = leaf(ergodic, "simulate", "spectral multiscale coverage");
  ergodic_sim->add_option("--config", config_path, "JSON configuration")->required();
  ergodic_sim->add_option("--coeffs", coeffs_path, "write target and achieved coefficients");
  ergodic_sim->add_option("--plot", plot_path, "write the path as SVG");
  handlers[ergodic_sim] = [&] {
    const json cfg = io::read_json(config_path);
    const json &target_node = cfg.contains("target") ? cfg.at("target") : json();
    MixtureModel target;
    if (target_node.is_string())
      target = io::mixture_from_json(io::read_json(resolve_near(config_path, target_node).string()));
    else if (target_node.is_object())
      target = io::mixture_from_json(target_node);
    else
      throw ValidationError("config 'target' must be a gmm-v1 object or a path to one");
    const FourierDomain dom(config_value<double>(cfg, "period"), static_cast<int>(target.dim()),
                            config_value<int>(cfg, "K"));
    ErgodicConfig ec{dom,
                     gmm_coeffs(target, dom),
                     smc_lambda(dom),
                     config_value<double>(cfg, "u_max"),
                     config_value<double>(cfg, "dt"),
                     config_value<int>(cfg, "steps"),
                     cfg.contains("seed") ? config_value<std::uint64_t>(cfg, "seed") : ctx.opt.seed};
    const Vec x0 = json_vector(cfg.contains("x0") ? cfg.at("x0") : json(), "config 'x0'");
    const auto res = simulate(ec, x0);
    const Index dim = dom.dim();
    Table t{{"step"}, Mat(res.trajectory.rows(), dim + 2)};
    append(t.header, numbered("x", dim));
    t.header.push_back("epsilon");
    for (Index s = 0; s < res.trajectory.rows(); ++s) {
      t.rows(s, 0) = static_cast<double>(s);
      t.rows.row(s).segment(1, dim) = res.trajectory.row(s);
      t.rows(s, dim + 1) = res.epsilon(s);
    }
    ctx.emit(encode(t, ctx));
    if (!coeffs_path.empty())
      io::write_text(coeffs_path, io::coeffs_csv(dom, {"target", "achieved"},
                                                 {ec.target, res.final_state.coeffs()}));
    if (!plot_path.empty()) {
      Trajectory path{Vec::LinSpaced(res.trajectory.rows(), 0.0, 1.0), res.trajectory};
      io::write_text(plot_path, plot::trajectory_svg({path}, "ergodic path"));
    }
    ctx.diag["steps"] = ec.steps;
    ctx.diag["final_epsilon"] = res.epsilon.size() ? res.epsilon(res.epsilon.size() - 1) : 0.0;
  };

  // promp fit | sample | condition | mixture
  BasisOptions basis;
  long steps = 0, count = 10;
  std::vector<std::string> via;
  auto *promp = group("promp", "probabilistic movement primitives");
  auto *promp_fit_cmd = leaf(promp, "fit", "weight distribution from demonstrations");
  promp_fit_cmd->add_option("--data", data_path, "trajectory CSV")->required();
  promp_fit_cmd->add_option("-T,--T", steps, "resample length (0: first demonstration)");
  add_basis_options(promp_fit_cmd, basis);
  handlers[promp_fit_cmd] = [&] {
    ctx.model_only();
    const auto file = io::read_trajectory_csv(data_path);
    const auto p = promp_fit(file.demos, basis.family(), steps);
    ctx.emit(io::dump(io::to_json(p)));
    ctx.diag["demonstrations"] = file.demos.size();
    ctx.diag["sigma2"] = p.sigma2();
  };
  auto *promp_sample = leaf(promp, "sample", "draw trajectories");
  promp_sample->add_option("--model", model_path, "promp-v1 JSON")->required();
  promp_sample->add_option("-n,--count", count)->capture_default_str();
  handlers[promp_sample] = [&] {
    const auto p = io::promp_from_json(io::read_json(model_path));
    ctx.emit(encode(trajectory_table(sample_trajectories(p, count, ctx.opt.seed)), ctx));
  };
  auto *promp_condition = leaf(promp, "condition", "condition on via-points");
  promp_condition->add_option("--model", model_path, "promp-v1 JSON")->required();
  promp_condition->add_option("--via", via, "t_index:dim=value@noise (repeatable)")->required();
  handlers[promp_condition] = [&] {
    const auto p = io::promp_from_json(io::read_json(model_path));
    std::vector<ViaPoint> points;
    for (const auto &text : via) {
      const auto v = parse_via(text);
      points.push_back({v.time_index, {v.dim}, Vec::Constant(1, v.value), v.noise});
    }
    const auto c = condition_via_points(p, points);
    if (ctx.opt.format == "csv") {
      const auto t = trajectory_table({unstack(c.psi().values * c.mu_w(), c.times(), c.dim())});
      ctx.emit(io::csv(t.header, t.rows));
    } else {
      ctx.emit(io::dump(io::to_json(c)));
    }
    ctx.diag["via_points"] = points.size();
  };
  auto *promp_mix = leaf(promp, "mixture", "mixture of ProMPs by EM in weight space");
  promp_mix->add_option("--data", data_path, "trajectory CSV")->required();
  promp_mix->add_option("-T,--T", steps, "resample length (0: first demonstration)");
  promp_mix->add_option("-k,--components", components)->capture_default_str();
  promp_mix->add_option("--init", init, "binning|kmeans++")->capture_default_str();
  promp_mix->add_option("--tol", tol)->capture_default_str();
  promp_mix->add_option("--max-iter", max_iter)->capture_default_str();
  add_basis_options(promp_mix, basis);
  handlers[promp_mix] = [&] {
    ctx.model_only();
    const auto file = io::read_trajectory_csv(data_path);
    EmConfig cfg{parse_init(init), tol, max_iter, ctx.opt.seed};
    const auto m = promp_mixture(file.demos, basis.family(), components, cfg, steps);
    ctx.emit(io::dump(io::to_json(m)));
  };

  // dataset gen
  std::string shape = "sine";
  long demos = 5, dataset_steps = 100, dim = 2;
  double noise = 0.0;
  auto *dataset = group("dataset", "synthetic demonstrations");
  auto *dataset_gen = leaf(dataset, "gen", "generate a trajectory CSV");
  dataset_gen->add_option("--shape", shape, "sine|spiral|loops")->capture_default_str();
  dataset_gen->add_option("-M,--M", demos, "number of demonstrations")->capture_default_str();
  dataset_gen->add_option("-T,--T", dataset_steps, "samples per demonstration")->capture_default_str();
  dataset_gen->add_option("-D,--D", dim, "dimension")->capture_default_str();
  dataset_gen->add_option("--noise", noise, "perturbation scale")->capture_default_str();
  handlers[dataset_gen] = [&] {
    const DatasetConfig cfg{dataset_shape_from_string(shape), demos, dataset_steps, dim, noise, ctx.opt.seed};
    ctx.emit(encode(trajectory_table(generate_dataset(cfg)), ctx));
  };

  // plot
  std::string kind, input, column;
  long plot_steps = 200, component = 0;
  auto *plot_cmd = app.add_subcommand("plot", "render an SVG figure");
  add_common(plot_cmd, true);
  plot_cmd->add_option("--kind", kind, "trajectory|coeff-heatmap|basis-functions|covariance-matrix")
      ->required();
  plot_cmd->add_option("--input", input, "CSV or JSON input");
  plot_cmd->add_option("--column", column, "coefficient column for coeff-heatmap");
  plot_cmd->add_option("--component", component, "mixture component for covariance-matrix");
  plot_cmd->add_option("-T,--T", plot_steps, "samples for basis-functions")->capture_default_str();
  add_basis_options(plot_cmd, basis);
  handlers[plot_cmd] = [&] {
    const auto k = plot::plot_kind_from_string(kind);
    const bool is_json = input.size() > 5 && input.substr(input.size() - 5) == ".json";
    std::string svg;
    switch (k) {
    case plot::PlotKind::trajectory: {
      require(!input.empty(), "trajectory plot needs --input");
      const auto table = io::read_csv(input);
      TrajectorySet set;
      if (!table.header.empty() && table.header.front() == "step") {
        Mat m = io::to_matrix(table);
        const Index d = m.cols() - 1 - (table.header.back() == "epsilon" ? 1 : 0);
        if (m.rows() > 0)
          set.push_back({m.col(0), m.middleCols(1, d)});
      } else {
        set = io::parse_trajectory_csv(table, input).demos;
      }
      svg = plot::trajectory_svg(set);
      break;
    }
    case plot::PlotKind::coeff_heatmap:
      require(!input.empty(), "coeff-heatmap needs --input");
      svg = plot::heatmap_svg(heatmap_grid(io::read_csv(input), column), "coefficients");
      break;
    case plot::PlotKind::basis_functions: {
      const BasisFamily family = input.empty()
                                     ? basis.family()
                                     : io::promp_from_json(io::read_json(input)).family();
      require(plot_steps >= 2, "--T must be >= 2");
      const Vec ts = uniform_times(plot_steps);
      svg = plot::basis_svg(ts, family.evaluate(ts), family.name());
      ctx.diag["partition_of_unity_deviation"] =
          plot::partition_of_unity_deviation(family.evaluate(ts));
      break;
    }
    case plot::PlotKind::covariance_matrix: {
      require(!input.empty(), "covariance-matrix needs --input");
      Mat cov;
      if (is_json) {
        const json j = io::read_json(input);
        const std::string version = j.value("version", "");
        if (version == "promp-v1") {
          cov = trajectory_distribution(io::promp_from_json(j)).cov();
        } else if (version == "gmm-v1") {
          const auto m = io::mixture_from_json(j);
          require(component >= 0 && component < m.size(), "--component out of range");
          cov = m.component(component).cov();
        } else {
          throw ValidationError(input + ": expected a promp-v1 or gmm-v1 document");
        }
      } else {
        cov = io::to_matrix(io::read_csv(input));
      }
      svg = plot::heatmap_svg(cov, "covariance");
      break;
    }
    }
    ctx.emit(svg);
  };

  std::vector<std::string> warnings;
  set_warning_handler([&](std::string_view w) {
    warnings.emplace_back(w);
    if (!ctx.opt.quiet)
      err << "warning: " << w << '\n';
  });
  struct HandlerReset {
    ~HandlerReset() { set_warning_handler(nullptr); }
  } reset;

  int code = exit_ok;
  bool usage_shown = false;
  std::string message;
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    const CLI::App *selected = &app;
    while (!selected->get_subcommands().empty()) {
      selected = selected->get_subcommands().front();
      command += (command.empty() ? "" : " ") + selected->get_name();
    }
    const auto it = handlers.find(selected);
    if (it == handlers.end())
      throw CLI::RequiredError("a subcommand");
    it->second();
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError &e) {
    code = exit_validation;
    message = e.what();
    err << "error: " << message << "\n\n" << app.help();
    usage_shown = true;
  } catch (const ValidationError &e) {
    code = exit_validation;
    message = e.what();
  } catch (const json::exception &e) {
    code = exit_validation;
    message = e.what();
  } catch (const NumericalError &e) {
    code = exit_numerical;
    message = e.what();
  } catch (const std::exception &e) {
    code = exit_numerical;
    message = e.what();
  }
  if (code != exit_ok && !usage_shown)
    err << "error: " << message << '\n';
  if (!ctx.opt.diagnostics.empty()) {
    json d = ctx.diag;
    d["command"] = command;
    d["exit_code"] = code;
    d["status"] = code == exit_ok ? "ok" : "error";
    if (code != exit_ok)
      d["message"] = message;
    d["warnings"] = warnings;
    try {
      io::write_text(ctx.opt.diagnostics, io::dump(d));
    } catch (const ValidationError &e) {
      err << "error: " << e.what() << '\n';
    }
  }
  return code;
}

} // namespace tsmix
