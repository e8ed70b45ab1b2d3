#include "swl/svg.hpp"

#include <cmath>
#include <sstream>

namespace swl {
namespace {

constexpr double kSize = 900.0;

double px(const Rational& r) { return 30.0 + to_double(r) * (kSize - 60.0); }
double py(const Rational& r) { return kSize - 30.0 - to_double(r) * (kSize - 60.0); }

void rect(std::ostringstream& os, const TriadicAddress& a, const char* stroke, const char* fill,
          double width) {
  const double x = px(a.lo(0)), y = py(a.hi(1));
  const double w = px(a.hi(0)) - px(a.lo(0));
  const double h = py(a.lo(1)) - py(a.hi(1));
  os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
     << "\" stroke=\"" << stroke << "\" fill=\"" << fill << "\" stroke-width=\"" << width
     << "\"/>\n";
}

}  // namespace

std::string support_svg(const WeightTree& tree) {
  if (tree.params.d != 2) throw SwlError(ErrorCode::Config, "support plots are d = 2 only");
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
     << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (int k = 0; k <= tree.params.K; ++k) {
    for (const auto& n : tree.gens[k].nodes) {
      rect(os, tree.node_addr(k, n), "#bbbbbb", "none", 0.6);
      rect(os, tree.hat_of(k, n), "#888888", "none", 0.5);
      TriadicAddress J = tree.j_of(k, n);
      rect(os, J, "#c0392b", "#e74c3c", 0.4);
      // chosen vertex and the cone rays from it
      RatPoint v = tree.vertex_of(k, n);
      const double cx = px(v[0]), cy = py(v[1]);
      os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"2\" fill=\"#2c3e50\"/>\n";
      const int8_t branch = detail::branch_of(n, tree.params.tie_break);
      const DPoint& z = branch > 0 ? tree.params.cones.z_plus : tree.params.cones.z_minus;
      const double len = 0.8 * (px(tree.hat_of(k, n).hi(0)) - px(tree.hat_of(k, n).lo(0)));
      // children sit in v - U: rays along -z rotated by +-asin(r/2)-ish spread
      const double base = std::atan2(-z[1], -z[0]);
      const double spread = std::asin(std::min(1.0, tree.params.cones.cap_radius / 2));
      for (double ang : {base - spread, base + spread}) {
        os << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\""
           << cx + len * std::cos(ang) << "\" y2=\"" << cy - len * std::sin(ang)
           << "\" stroke=\"#2980b9\" stroke-width=\"0.5\"/>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string ratio_trend_svg(const std::vector<RatioTrendSeries>& series) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"600\" "
     << "viewBox=\"0 0 " << kSize << " 600\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"60\" y1=\"540\" x2=\"860\" y2=\"540\" stroke=\"black\"/>\n";
  os << "<line x1=\"60\" y1=\"540\" x2=\"60\" y2=\"40\" stroke=\"black\"/>\n";
  double xmin = 1e300, xmax = -1e300, ymin = 0, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  if (series.empty() || xmax <= xmin) {
    os << "</svg>\n";
    return os.str();  // valid empty-axes chart
  }
  if (ymax <= ymin) ymax = 1;
  const char* colors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#f39c12"};
  auto X = [&](double x) { return 60 + (x - xmin) / (xmax - xmin) * 800.0; };
  auto Y = [&](double y) { return 540 - (y - ymin) / (ymax - ymin) * 500.0; };
  int ci = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 5] << "\" stroke-width=\"1.5\" "
       << "points=\"";
    for (auto [x, y] : s.points) os << X(x) << ',' << Y(y) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << 870 << "\" y=\"" << 50 + 20 * ci << "\" font-size=\"12\">gen "
       << s.generation << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace swl
