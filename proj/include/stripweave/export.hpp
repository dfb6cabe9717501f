#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stripweave/bspline.hpp"
#include "stripweave/solver.hpp"

namespace stripweave {

struct CubicSegment {
  std::array<Eigen::Vector2d, 4> p;
  Eigen::Vector2d at(double t) const;
};

/// Closed boundary: u2 = min forward, u1 = max, u2 = max backward, u1 = min.
using BezierPath = std::vector<CubicSegment>;

/// Bezier extraction of the four boundary curves, elevated to cubic.
/// Throws for degrees outside 1..3.
BezierPath boundary_beziers(const BSplineManifold2D& m);

/// "%.6f" with "-0.000000" folded to "0.000000".
std::string fmt_mm(double v);

struct SvgStyle {
  double scale = 100.0;  // mm per model unit
  double margin = 0.0;   // mm
  double stroke_width = 0.2;
  std::string stroke = "#000000";
};

/// y is flipped so the drawing keeps the orientation of the model plane.
std::string export_strip_svg(const BSplineManifold2D& m, const SvgStyle& style = {});

struct KitLayout {
  double page_width = 210.0;
  double page_height = 297.0;
  double margin = 10.0;
  double gap = 4.0;
  double scale = 100.0;
  double stroke_width = 0.2;
  double font_size = 3.0;
  bool labels = true;
};

struct Placement {
  int strip = 0;
  int page = 0;
  double angle = 0.0;           // rotation applied in model units (radians)
  Eigen::Vector2d offset;       // mm, after rotation and scaling
  double x = 0.0, y = 0.0;      // bounding box on the page, mm
  double width = 0.0, height = 0.0;
};

struct Kit {
  std::vector<std::string> pages;
  std::vector<Placement> placements;
};

/// Shelf packing; each strip is rotated so its center chord is horizontal.
/// `labels` are printed inside each strip (defaults to the strip position).
Kit export_kit(const std::vector<BSplineManifold2D>& strips, const KitLayout& layout,
               const std::vector<std::string>& labels = {});

std::string export_strain_csv(const StrainField& field);

struct Rgb {
  int r = 0, g = 0, b = 0;
  bool operator==(const Rgb& o) const { return r == o.r && g == o.g && b == o.b; }
};

/// Diverging palette on t in [-1, 1]: blue, near-white at 0, red.
Rgb diverging_color(double t);

std::string export_strain_heatmap(const StrainField& field, double scale = 100.0);

}  // namespace stripweave
