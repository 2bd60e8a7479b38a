#include "tsmix/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tsmix::plot {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 40.0;

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void widen() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

class Canvas {
public:
  Canvas(const std::string &title, Range x, Range y) : x_(x), y_(y) {
    x_.widen();
    y_.widen();
    s_ << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
       << "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" "
          "\"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<title>" << escape(title) << "</title>\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n";
  }

  double px(double x) const { return kMargin + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - 2 * kMargin);
  }

  void axes(const std::string &xlabel, const std::string &ylabel) {
    const double x0 = kMargin, x1 = kWidth - kMargin, y0 = kHeight - kMargin, y1 = kMargin;
    s_ << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
       << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\""
       << num(y0) << "\"/>\n"
       << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\""
       << num(y1) << "\"/>\n</g>\n";
    text(x0, y0 + 14, num(x_.lo), "start");
    text(x1, y0 + 14, num(x_.hi), "end");
    text(x0 - 4, y0, num(y_.lo), "end");
    text(x0 - 4, y1 + 8, num(y_.hi), "end");
    text((x0 + x1) / 2, kHeight - 6, xlabel, "middle");
    text(12, (y0 + y1) / 2, ylabel, "middle");
  }

  void text(double x, double y, const std::string &t, const char *anchor) {
    s_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"10\" "
       << "text-anchor=\"" << anchor << "\">" << escape(t) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>> &pts, const char *color) {
    if (pts.empty())
      return;
    s_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      s_ << (i ? " " : "") << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
    s_ << "\"/>\n";
  }

  std::ostringstream &raw() { return s_; }

  std::string finish() {
    s_ << "</svg>\n";
    return s_.str();
  }

private:
  Range x_, y_;
  std::ostringstream s_;
};

Range range_of(const std::vector<double> &v) {
  if (v.empty())
    return {};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

/// Diverging blue-white-red map for v in [-1, 1].
std::string color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (v >= 0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - v)));
  } else {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + v)));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

} // namespace

PlotKind plot_kind_from_string(const std::string &name) {
  if (name == "trajectory")
    return PlotKind::trajectory;
  if (name == "coeff-heatmap")
    return PlotKind::coeff_heatmap;
  if (name == "basis-functions")
    return PlotKind::basis_functions;
  if (name == "covariance-matrix")
    return PlotKind::covariance_matrix;
  throw ValidationError("unknown plot kind '" + name +
                        "' (expected trajectory|coeff-heatmap|basis-functions|covariance-matrix)");
}

std::string trajectory_svg(const TrajectorySet &demos, const std::string &title) {
  const bool planar = !demos.empty() && demos.front().values.cols() >= 2;
  std::vector<double> xs, ys;
  for (const auto &d : demos)
    for (Index i = 0; i < d.times.size(); ++i) {
      xs.push_back(planar ? d.values(i, 0) : d.times(i));
      ys.push_back(planar ? d.values(i, 1) : d.values(i, 0));
    }
  Canvas c(title, range_of(xs), range_of(ys));
  c.axes(planar ? "x1" : "t", planar ? "x2" : "x1");
  for (std::size_t m = 0; m < demos.size(); ++m) {
    const auto &d = demos[m];
    std::vector<std::pair<double, double>> pts;
    for (Index i = 0; i < d.times.size(); ++i)
      pts.emplace_back(planar ? d.values(i, 0) : d.times(i), planar ? d.values(i, 1) : d.values(i, 0));
    c.polyline(pts, kPalette[m % std::size(kPalette)]);
  }
  return c.finish();
}

std::string heatmap_svg(const Mat &grid, const std::string &title) {
  Canvas c(title, {0.0, static_cast<double>(std::max<Index>(grid.cols(), 1))},
           {0.0, static_cast<double>(std::max<Index>(grid.rows(), 1))});
  c.axes("column", "row");
  const double scale = grid.size() ? grid.cwiseAbs().maxCoeff() : 0.0;
  const double cw = (kWidth - 2 * kMargin) / static_cast<double>(std::max<Index>(grid.cols(), 1));
  const double ch = (kHeight - 2 * kMargin) / static_cast<double>(std::max<Index>(grid.rows(), 1));
  auto &s = c.raw();
  s << "<g id=\"cells\" stroke=\"none\">\n";
  for (Index r = 0; r < grid.rows(); ++r)
    for (Index col = 0; col < grid.cols(); ++col) {
      const double v = scale > 0 ? grid(r, col) / scale : 0.0;
      s << "<rect x=\"" << num(kMargin + static_cast<double>(col) * cw) << "\" y=\""
        << num(kMargin + static_cast<double>(r) * ch) << "\" width=\"" << num(cw) << "\" height=\""
        << num(ch) << "\" fill=\"" << color(v) << "\"/>\n";
    }
  s << "</g>\n";
  return c.finish();
}

double partition_of_unity_deviation(const Mat &phi) {
  if (phi.size() == 0)
    return 0.0;
  return (phi.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

std::string basis_svg(const Vec &times, const Mat &phi, const std::string &title) {
  require(times.size() == phi.rows(), "basis plot: one time per row of phi");
  std::vector<double> ts(times.data(), times.data() + times.size());
  std::vector<double> vs(phi.data(), phi.data() + phi.size());
  vs.push_back(0.0);
  Canvas c(title, range_of(ts), range_of(vs));
  c.axes("t", "phi");
  const double dev = partition_of_unity_deviation(phi);
  c.raw() << "<desc id=\"partition-of-unity\">functions=" << phi.cols()
          << " max_abs_deviation=" << (dev == 0.0 ? std::string("0") : [&] {
               char buf[32];
               std::snprintf(buf, sizeof(buf), "%.3e", dev);
               return std::string(buf);
             }()) << " holds=" << (dev <= 1e-9 ? "true" : "false") << "</desc>\n";
  for (Index k = 0; k < phi.cols(); ++k) {
    std::vector<std::pair<double, double>> pts;
    for (Index i = 0; i < phi.rows(); ++i)
      pts.emplace_back(times(i), phi(i, k));
    c.polyline(pts, kPalette[static_cast<std::size_t>(k) % std::size(kPalette)]);
  }
  return c.finish();
}

} // namespace tsmix::plot
