/*
 Copyright 2026 The symvar authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <array>
#include <iomanip>
#include <sstream>

#include "symvar/geometry.hpp"
#include "symvar/pde.hpp"

namespace symvar {

/// Zero-level-set segments of a scalar field sampled on a res x res grid
/// over [x0,x1] x [y0,y1] (marching squares, linear interpolation).
template <typename Fn>
std::vector<std::array<double, 4>> level_set_segments(Fn&& f, double x0, double y0, double x1,
                                                      double y1, int res = 200) {
  std::vector<std::array<double, 4>> segs;
  const double dx = (x1 - x0) / res, dy = (y1 - y0) / res;
  std::vector<double> vals(static_cast<std::size_t>(res + 1) * (res + 1));
  for (int i = 0; i <= res; ++i)
    for (int j = 0; j <= res; ++j)
      vals[static_cast<std::size_t>(i) * (res + 1) + j] = f(x0 + j * dx, y0 + i * dy);

  const auto lerp = [](double a, double b, double va, double vb) {
    const double t = va / (va - vb);
    return a + t * (b - a);
  };
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const double xa = x0 + j * dx, xb = xa + dx;
      const double ya = y0 + i * dy, yb = ya + dy;
      const double v00 = vals[static_cast<std::size_t>(i) * (res + 1) + j];
      const double v01 = vals[static_cast<std::size_t>(i) * (res + 1) + j + 1];
      const double v10 = vals[static_cast<std::size_t>(i + 1) * (res + 1) + j];
      const double v11 = vals[static_cast<std::size_t>(i + 1) * (res + 1) + j + 1];
      std::vector<std::pair<double, double>> pts;
      if ((v00 < 0) != (v01 < 0)) pts.emplace_back(lerp(xa, xb, v00, v01), ya);
      if ((v10 < 0) != (v11 < 0)) pts.emplace_back(lerp(xa, xb, v10, v11), yb);
      if ((v00 < 0) != (v10 < 0)) pts.emplace_back(xa, lerp(ya, yb, v00, v10));
      if ((v01 < 0) != (v11 < 0)) pts.emplace_back(xb, lerp(ya, yb, v01, v11));
      if (pts.size() >= 2)
        segs.push_back({pts[0].first, pts[0].second, pts[1].first, pts[1].second});
      if (pts.size() == 4)
        segs.push_back({pts[2].first, pts[2].second, pts[3].first, pts[3].second});
    }
  return segs;
}

class SvgCanvas {
 public:
  SvgCanvas(double x0, double y0, double x1, double y1, int pixels = 640)
      : x0_(x0), y0_(y0), x1_(x1), y1_(y1), pix_(pixels) {
    body_.precision(6);
  }

  void polyline_segments(const std::vector<std::array<double, 4>>& segs, const std::string& color,
                         double width = 1.5) {
    for (const auto& s : segs)
      body_ << "<line x1=\"" << px(s[0]) << "\" y1=\"" << py(s[1]) << "\" x2=\"" << px(s[2])
            << "\" y2=\"" << py(s[3]) << "\" stroke=\"" << color << "\" stroke-width=\"" << width
            << "\"/>\n";
  }
  void circle(double cx, double cy, double r, const std::string& stroke,
              const std::string& fill = "none") {
    body_ << "<circle cx=\"" << px(cx) << "\" cy=\"" << py(cy) << "\" r=\"" << r * scale()
          << "\" stroke=\"" << stroke << "\" fill=\"" << fill << "\" stroke-width=\"1.5\"/>\n";
  }
  void point(double cx, double cy, const std::string& color, double r = 3.5) {
    body_ << "<circle cx=\"" << px(cx) << "\" cy=\"" << py(cy) << "\" r=\"" << r << "\" fill=\""
          << color << "\"/>\n";
  }
  void label(double cx, double cy, const std::string& text, const std::string& color = "#333") {
    body_ << "<text x=\"" << px(cx) + 6 << "\" y=\"" << py(cy) - 6 << "\" font-size=\"13\" fill=\""
          << color << "\">" << text << "</text>\n";
  }

  std::string finish() const {
    std::ostringstream os;
    const int h = static_cast<int>(pix_ * (y1_ - y0_) / (x1_ - x0_));
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pix_ << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << pix_ << " " << h << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double scale() const { return pix_ / (x1_ - x0_); }
  double px(double x) const { return (x - x0_) * scale(); }
  double py(double y) const { return (y1_ - y) * scale(); }  // y up
  double x0_, y0_, x1_, y1_;
  int pix_;
  std::ostringstream body_;
};

inline const char* orbit_color(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};
  return colors[i % 8];
}

/// Petal (or drop) orbit scene: one contour per group element, the focus
/// orbit, the apex orbit and the point cloud.
inline std::string flower_scene_svg(const Vector& a, const Vector& b, const PointCloud* cloud,
                                    double gamma, const FiniteGroup& g, bool drops = false,
                                    double radius = 0.0) {
  if (a.size() != 2) throw Error("svg: scenes are 2-D");
  double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
  const auto absorb = [&](const Vector& v) {
    x0 = std::min(x0, v[0]);
    x1 = std::max(x1, v[0]);
    y0 = std::min(y0, v[1]);
    y1 = std::max(y1, v[1]);
  };
  std::vector<Vector> ga, gb;
  for (const auto& e : g.elements) {
    ga.push_back(e.apply(a));
    gb.push_back(e.apply(b));
    absorb(ga.back());
    absorb(gb.back());
  }
  if (cloud)
    for (const auto& p : cloud->points) absorb(p);
  const double pad = std::max(1.0, 0.6 * distance(a, b) + radius);
  x0 -= pad;
  y0 -= pad;
  x1 += pad;
  y1 += pad;

  SvgCanvas canvas(x0, y0, x1, y1);
  for (std::size_t i = 0; i < g.order(); ++i) {
    const auto member = [&](double x, double y) {
      const Vector v({x, y}, a.norm_tag());
      if (drops)
        return drop_contains(Drop{ga[i], Ball(gb[i], radius)}, v) ? -1.0 : 1.0;
      return petal_contains(Petal(ga[i], gb[i], gamma), v) ? -1.0 : 1.0;
    };
    canvas.polyline_segments(level_set_segments(member, x0, y0, x1, y1, 220), orbit_color(i));
    canvas.point(ga[i][0], ga[i][1], orbit_color(i));
    canvas.point(gb[i][0], gb[i][1], orbit_color(i), 2.5);
  }
  canvas.label(ga[0][0], ga[0][1], "a");
  canvas.label(gb[0][0], gb[0][1], "b");
  if (cloud)
    for (const auto& p : cloud->points) canvas.point(p[0], p[1], "#333", 2.0);
  return canvas.finish();
}

/// Contour plot of a grid field at evenly spaced levels.
inline std::string field_contours_svg(const SymmetricGrid& grid, const GridField& u,
                                      int levels = 9) {
  double lo = kInf, hi = -kInf;
  for (double v : u.v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-15) hi = lo + 1.0;
  const auto sample = [&](double x, double y) {
    // Bilinear interpolation of the nodal field at (x, y) in [0,1]^2.
    const double fi = std::clamp(y, 0.0, 1.0) * (grid.m() - 1);
    const double fj = std::clamp(x, 0.0, 1.0) * (grid.m() - 1);
    const int i = std::min(grid.m() - 2, static_cast<int>(fi));
    const int j = std::min(grid.m() - 2, static_cast<int>(fj));
    const double ti = fi - i, tj = fj - j;
    return (1 - ti) * ((1 - tj) * u(i, j) + tj * u(i, j + 1)) +
           ti * ((1 - tj) * u(i + 1, j) + tj * u(i + 1, j + 1));
  };
  SvgCanvas canvas(-0.05, -0.05, 1.05, 1.05);
  canvas.polyline_segments(
      {{0, 0, 1, 0}, {1, 0, 1, 1}, {1, 1, 0, 1}, {0, 1, 0, 0}}, "#888", 1.0);
  for (int l = 1; l <= levels; ++l) {
    const double level = lo + (hi - lo) * l / (levels + 1.0);
    const auto f = [&](double x, double y) { return sample(x, y) - level; };
    canvas.polyline_segments(level_set_segments(f, 0.0, 0.0, 1.0, 1.0, 180), orbit_color(l), 1.2);
  }
  return canvas.finish();
}

}  // namespace symvar
