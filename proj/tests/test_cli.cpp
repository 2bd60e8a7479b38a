#include "doctest.h"

#include <cmath>
#include <sstream>

#include "temp_dir.hpp"
#include "tsmix/cli.hpp"
#include "tsmix/gmr.hpp"
#include "tsmix/io.hpp"
#include "tsmix/plot.hpp"

using namespace tsmix;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count(const std::string &text, const std::string &needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + needle.size()))
    ++n;
  return n;
}

io::CsvTable parse(const std::string &text) {
  std::istringstream in(text);
  return io::parse_csv(in, "output");
}

std::string two_cluster_data(const TempDir &dir) {
  std::string csv = "x,y\n";
  for (int i = 0; i < 40; ++i) {
    const double s = i < 20 ? -2.0 : 2.0;
    const double u = 0.05 * ((i * 37) % 17 - 8);
    csv += io::format_double(s + u) + "," + io::format_double(0.5 * s + 0.3 * u + 0.01 * (i % 3)) + "\n";
  }
  const auto path = dir.file("points.csv");
  io::write_text(path, csv);
  return path;
}

} // namespace

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  const auto unknown = run({"gmm", "fit", "--data", "x.csv", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({"gmm", "fit", "--data", "/nonexistent.csv"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  TempDir dir;
  const auto model = dir.file("narrow.json");
  const MixtureModel narrow(Vec::Ones(1), {Gaussian(Vec::Zero(2), 1e-4 * Mat::Identity(2, 2))});
  io::write_text(model, io::dump(io::to_json(narrow)));
  const auto far = run({"gmr", "predict", "--model", model, "--in", "0", "--out", "1", "--grid", "50:50:1"});
  CHECK(far.code == 3);
  CHECK(far.err.find("error:") != std::string::npos);

  const auto data = two_cluster_data(dir);
  CHECK(run({"gmm", "fit", "--data", data, "-k", "2", "--format", "csv"}).code == 2);
  CHECK(run({"promp", "condition", "--model", model, "--via", "1:0=0.5"}).code == 2);
}

TEST_CASE("via-point syntax") {
  const auto v = parse_via("12:1=-0.5@1e-6");
  CHECK(v.time_index == 12);
  CHECK(v.dim == 1);
  CHECK(v.value == -0.5);
  CHECK(v.noise == 1e-6);
  CHECK_THROWS_AS(parse_via("12:1=0.5"), ValidationError);
  CHECK_THROWS_AS(parse_via("a:1=0.5@1"), ValidationError);
  CHECK_THROWS_AS(parse_via("1:1=0.5@-1"), ValidationError);
}

TEST_CASE("seeded runs are byte-identical") {
  TempDir dir;
  const auto data = two_cluster_data(dir);
  const std::vector<std::string> fit = {"gmm", "fit", "--data", data, "-k", "2", "--init", "kmeans++", "--seed", "5"};
  const auto a = run(fit), b = run(fit);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto noisy = run({"dataset", "gen", "--shape", "spiral", "--noise", "0.1", "--seed", "3"});
  CHECK(noisy.out == run({"dataset", "gen", "--shape", "spiral", "--noise", "0.1", "--seed", "3"}).out);
  CHECK(noisy.out != run({"dataset", "gen", "--shape", "spiral", "--noise", "0.1", "--seed", "4"}).out);
}

TEST_CASE("regression output matches the library") {
  TempDir dir;
  const auto data = two_cluster_data(dir);
  const auto model = dir.file("gmm.json");
  REQUIRE(run({"gmm", "fit", "--data", data, "-k", "2", "-o", model}).code == 0);
  const auto r = run({"gmr", "predict", "--model", model, "--in", "0", "--out", "1", "--grid", "-2:2:9"});
  REQUIRE(r.code == 0);
  const auto joint = io::mixture_from_json(io::read_json(model));
  const GmrRegressor reg(joint, DimensionSplit({0}, {1}, 2));
  const Mat q = Vec::LinSpaced(9, -2.0, 2.0);
  const auto batch = reg.predict(q);
  Mat expected(9, 3);
  for (Index i = 0; i < 9; ++i)
    expected.row(i) << q(i, 0), batch.means(i, 0), batch.covs[static_cast<std::size_t>(i)](0, 0);
  CHECK(r.out == io::csv({"q1", "mean1", "cov1_1"}, expected));
}

TEST_CASE("dataset generation") {
  const auto r = run({"dataset", "gen", "--shape", "sine", "-M", "3", "-T", "11", "-D", "2", "--noise", "0"});
  REQUIRE(r.code == 0);
  const auto t = parse(r.out);
  CHECK(t.header == std::vector<std::string>{"traj_id", "t", "x1", "x2"});
  REQUIRE(t.rows.size() == 33);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto &row = t.rows[i];
    CHECK(row[0] == static_cast<double>(i / 11));
    const double time = row[1];
    CHECK(row[2] == doctest::Approx(std::sin(2.0 * M_PI * time)).epsilon(1e-15));
    CHECK(row[3] == doctest::Approx(std::sin(2.0 * M_PI * time + M_PI / 2)).epsilon(1e-15));
  }
  CHECK(run({"dataset", "gen", "--shape", "triangle"}).code == 2);
}

TEST_CASE("model pipelines") {
  TempDir dir;
  const auto demos = dir.file("demos.csv");
  REQUIRE(run({"dataset", "gen", "--shape", "sine", "-M", "4", "-T", "40", "-D", "2", "--noise", "0.05", "-o", demos}).code == 0);
  const auto promp = dir.file("promp.json");
  const auto diag = dir.file("diag.json");
  REQUIRE(run({"promp", "fit", "--data", demos, "-K", "6", "-o", promp, "--diagnostics", diag}).code == 0);
  const auto d = io::read_json(diag);
  CHECK(d["status"] == "ok");
  CHECK(d["exit_code"] == 0);

  const auto samples = run({"promp", "sample", "--model", promp, "-n", "3", "--seed", "2"});
  REQUIRE(samples.code == 0);
  CHECK(parse(samples.out).rows.size() == 120);

  const auto cond = run({"promp", "condition", "--model", promp, "--via", "39:0=0.25@1e-10", "--format", "csv"});
  REQUIRE(cond.code == 0);
  const auto mean = parse(cond.out);
  CHECK(std::abs(mean.rows.back()[2] - 0.25) <= 1e-4);
  const auto json_cond = run({"promp", "condition", "--model", promp, "--via", "0:1=1@0.01", "--via", "5:0=0@0.01"});
  REQUIRE(json_cond.code == 0);
  CHECK(io::promp_from_json(io::json::parse(json_cond.out)).steps() == 40);

  REQUIRE(run({"promp", "mixture", "--data", demos, "-k", "2", "-K", "4", "-o", dir.file("mix.json")}).code == 0);
  CHECK(io::promp_mixture_from_json(io::read_json(dir.file("mix.json"))).weights.size() == 2);

  const auto curve = dir.file("curve.json");
  REQUIRE(run({"bezier", "fit", "--data", demos, "--id", "2", "--degree", "4", "-o", curve}).code == 0);
  const auto eval = run({"bezier", "eval", "--curve", curve, "--samples", "5", "--method", "direct"});
  REQUIRE(eval.code == 0);
  CHECK(parse(eval.out).header == std::vector<std::string>{"t", "x1", "x2"});

  const auto lwr_model = dir.file("lwr.json");
  REQUIRE(run({"lwr", "fit", "--data", demos, "--in", "0", "--out", "1,2", "-K", "5", "-o", lwr_model}).code == 0);
  const auto pred = run({"lwr", "predict", "--model", lwr_model, "--grid", "0:1:7", "--format", "json"});
  REQUIRE(pred.code == 0);
  CHECK(io::json::parse(pred.out)["rows"].size() == 7);
}

TEST_CASE("ergodic simulation and figures") {
  TempDir dir;
  const MixtureModel target(Vec::Ones(1), {Gaussian((Vec(2) << 0.4, 0.5).finished(), 0.01 * Mat::Identity(2, 2))});
  io::write_text(dir.file("target.json"), io::dump(io::to_json(target)));
  io::write_text(dir.file("cfg.json"), R"({"period": 2.0, "K": 5, "target": "target.json", "u_max": 0.2,
                                          "dt": 0.1, "steps": 60, "x0": [0.1, 0.2]})");
  const auto coeffs = dir.file("coeffs.csv");
  const auto r = run({"ergodic", "simulate", "--config", dir.file("cfg.json"), "--coeffs", coeffs, "-o",
                      dir.file("path.csv")});
  REQUIRE(r.code == 0);
  const auto path = io::read_csv(dir.file("path.csv"));
  CHECK(path.header == std::vector<std::string>{"step", "x1", "x2", "epsilon"});
  CHECK(path.rows.size() == 60);

  const auto heat = run({"plot", "--kind", "coeff-heatmap", "--input", coeffs, "--column", "target"});
  REQUIRE(heat.code == 0);
  CHECK(count(heat.out, "<rect") >= 25);
  const auto cells = heat.out.substr(heat.out.find("<g id=\"cells\""));
  CHECK(count(cells.substr(0, cells.find("</g>")), "<rect") == 25);

  const auto traj = run({"plot", "--kind", "trajectory", "--input", dir.file("path.csv")});
  REQUIRE(traj.code == 0);
  CHECK(traj.out.find("<polyline") != std::string::npos);

  const auto basis = run({"plot", "--kind", "basis-functions", "--basis", "radial", "-K", "6", "-T", "50"});
  REQUIRE(basis.code == 0);
  CHECK(basis.out.find("holds=true") != std::string::npos);
  const auto raw = run({"plot", "--kind", "basis-functions", "--unnormalized", "-K", "6"});
  CHECK(raw.out.find("holds=false") != std::string::npos);

  const auto empty = plot::trajectory_svg({});
  CHECK(empty.find("<line") != std::string::npos);
  CHECK(empty.find("</svg>") != std::string::npos);
}
