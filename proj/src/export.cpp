#include "stripweave/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Geometry>

#include "stripweave/errors.hpp"

namespace stripweave {

Eigen::Vector2d CubicSegment::at(double t) const {
  const double s = 1.0 - t;
  return s * s * s * p[0] + 3.0 * s * s * t * p[1] + 3.0 * s * t * t * p[2] + t * t * t * p[3];
}

namespace {

// Bezier segments of one clamped curve, elevated to cubic.
std::vector<CubicSegment> curve_segments(BSplineSpace space, Eigen::MatrixXd ctrl) {
  const int p = space.degree();
  if (p < 1 || p > 3) throw Error("SVG export needs degrees between 1 and 3, got " + std::to_string(p));
  std::vector<double> extra;
  const std::vector<double> bp = space.breakpoints();
  for (std::size_t i = 1; i + 1 < bp.size(); ++i) {
    if (space.multiplicity(bp[i]) > p) throw Error("boundary curve is discontinuous at a knot");
  }
  for (std::size_t i = 1; i + 1 < bp.size(); ++i)
    for (int k = space.multiplicity(bp[i]); k < p; ++k) extra.push_back(bp[i]);
  insert_knots(space, ctrl, extra);
  std::vector<CubicSegment> out;
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    std::vector<Eigen::Vector2d> q;
    // After extraction the segment starts at the last copy of its left knot.
    const int first = static_cast<int>(e) * p;
    for (int k = 0; k <= p; ++k) q.push_back(ctrl.row(first + k).transpose());
    CubicSegment s;
    if (p == 1) {
      s.p = {q[0], q[0] + (q[1] - q[0]) / 3.0, q[0] + 2.0 * (q[1] - q[0]) / 3.0, q[1]};
    } else if (p == 2) {
      s.p = {q[0], q[0] + 2.0 / 3.0 * (q[1] - q[0]), q[2] + 2.0 / 3.0 * (q[1] - q[2]), q[2]};
    } else {
      s.p = {q[0], q[1], q[2], q[3]};
    }
    out.push_back(s);
  }
  return out;
}

void append_reversed(BezierPath& path, std::vector<CubicSegment> segs) {
  std::reverse(segs.begin(), segs.end());
  for (CubicSegment& s : segs) {
    std::reverse(s.p.begin(), s.p.end());
    path.push_back(s);
  }
}

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();
  void add(const Eigen::Vector2d& p) {
    x0 = std::min(x0, p.x());
    y0 = std::min(y0, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  }
};

Box path_box(const BezierPath& path) {
  Box b;
  for (const CubicSegment& s : path)
    for (const Eigen::Vector2d& p : s.p) b.add(p);
  return b;
}

std::string svg_header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt_mm(w) + "mm\" height=\"" + fmt_mm(h) + "mm\" viewBox=\"0 0 " + fmt_mm(w) + " " + fmt_mm(h) + "\">\n";
}

// Path data with page coordinates X = (x - ox) * scale + px, Y = (oy - y) * scale + py.
std::string path_data(const BezierPath& path, double ox, double oy, double scale, double px, double py) {
  auto xy = [&](const Eigen::Vector2d& p) {
    return fmt_mm((p.x() - ox) * scale + px) + " " + fmt_mm((oy - p.y()) * scale + py);
  };
  std::string d = "M " + xy(path.front().p[0]);
  for (const CubicSegment& s : path) d += " C " + xy(s.p[1]) + " " + xy(s.p[2]) + " " + xy(s.p[3]);
  return d + " Z";
}

}  // namespace

BezierPath boundary_beziers(const BSplineManifold2D& m) {
  const int n1 = m.n1(), n2 = m.n2();
  Eigen::MatrixXd bottom(n1, 2), top(n1, 2), left(n2, 2), right(n2, 2);
  for (int i = 0; i < n1; ++i) {
    bottom.row(i) = m.point(i, 0).transpose();
    top.row(i) = m.point(i, n2 - 1).transpose();
  }
  for (int j = 0; j < n2; ++j) {
    left.row(j) = m.point(0, j).transpose();
    right.row(j) = m.point(n1 - 1, j).transpose();
  }
  BezierPath path = curve_segments(m.space1(), bottom);
  for (const CubicSegment& s : curve_segments(m.space2(), right)) path.push_back(s);
  append_reversed(path, curve_segments(m.space1(), top));
  append_reversed(path, curve_segments(m.space2(), left));
  return path;
}

std::string fmt_mm(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string export_strip_svg(const BSplineManifold2D& m, const SvgStyle& style) {
  const BezierPath path = boundary_beziers(m);
  const Box b = path_box(path);
  const double w = (b.x1 - b.x0) * style.scale + 2.0 * style.margin;
  const double h = (b.y1 - b.y0) * style.scale + 2.0 * style.margin;
  std::string out = svg_header(w, h);
  out += "<path d=\"" + path_data(path, b.x0, b.y1, style.scale, style.margin, style.margin) +
         "\" fill=\"none\" stroke=\"" + style.stroke + "\" stroke-width=\"" + fmt_mm(style.stroke_width) + "\"/>\n";
  out += "</svg>\n";
  return out;
}

Kit export_kit(const std::vector<BSplineManifold2D>& strips, const KitLayout& layout,
               const std::vector<std::string>& labels) {
  Kit kit;
  const double usable_w = layout.page_width - 2.0 * layout.margin;
  const double usable_h = layout.page_height - 2.0 * layout.margin;
  std::vector<std::string> bodies;
  double cx = layout.margin, cy = layout.margin, shelf = 0.0;
  int page = 0;
  for (std::size_t k = 0; k < strips.size(); ++k) {
    const BSplineManifold2D& m = strips[k];
    const double um = 0.5 * (m.space2().lower() + m.space2().upper());
    const Eigen::Vector2d chord = evaluate(m, m.space1().upper(), um) - evaluate(m, m.space1().lower(), um);
    const double angle = -std::atan2(chord.y(), chord.x());
    const Eigen::Matrix2d R = Eigen::Rotation2D<double>(angle).toRotationMatrix();
    BezierPath path = boundary_beziers(m);
    for (CubicSegment& s : path)
      for (Eigen::Vector2d& p : s.p) p = R * p;
    const Box b = path_box(path);
    const double w = (b.x1 - b.x0) * layout.scale, h = (b.y1 - b.y0) * layout.scale;
    if (w > usable_w || h > usable_h) {
      throw Error("strip " + std::to_string(k) + " (" + fmt_mm(w) + " x " + fmt_mm(h) + " mm) does not fit the page");
    }
    if (cx + w > layout.margin + usable_w) {
      cx = layout.margin;
      cy += shelf + layout.gap;
      shelf = 0.0;
    }
    if (cy + h > layout.margin + usable_h) {
      ++page;
      cx = layout.margin;
      cy = layout.margin;
      shelf = 0.0;
    }
    if (static_cast<int>(bodies.size()) <= page) bodies.emplace_back();
    Placement pl;
    pl.strip = static_cast<int>(k);
    pl.page = page;
    pl.angle = angle;
    pl.x = cx;
    pl.y = cy;
    pl.width = w;
    pl.height = h;
    pl.offset = Eigen::Vector2d(cx - b.x0 * layout.scale, cy + b.y1 * layout.scale);
    std::string& body = bodies[page];
    body += "<path d=\"" + path_data(path, b.x0, b.y1, layout.scale, cx, cy) +
            "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"" + fmt_mm(layout.stroke_width) + "\"/>\n";
    if (layout.labels) {
      const std::string text = k < labels.size() ? labels[k] : std::to_string(k);
      body += "<text x=\"" + fmt_mm(cx + 0.5 * w) + "\" y=\"" + fmt_mm(cy + 0.5 * h) + "\" font-family=\"sans-serif\" font-size=\"" +
              fmt_mm(layout.font_size) + "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" + text + "</text>\n";
    }
    kit.placements.push_back(pl);
    cx += w + layout.gap;
    shelf = std::max(shelf, h);
  }
  for (const std::string& body : bodies)
    kit.pages.push_back(svg_header(layout.page_width, layout.page_height) + body + "</svg>\n");
  return kit;
}

std::string export_strain_csv(const StrainField& field) {
  if (field.samples.empty()) throw Error("empty strain field");
  std::string out = "u1,u2,x,y,E11o,E22o,E12o,density\n";
  char line[512];
  for (const StrainSample& s : field.samples) {
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", s.u1, s.u2, s.x.x(), s.x.y(),
                  s.E0(0, 0), s.E0(1, 1), s.E0(0, 1), s.density);
    out += line;
  }
  return out;
}

Rgb diverging_color(double t) {
  t = std::clamp(t, -1.0, 1.0);
  const double mid[3] = {247, 247, 247};
  const double neg[3] = {59, 76, 192};
  const double pos[3] = {180, 4, 38};
  const double* end = t < 0.0 ? neg : pos;
  const double a = std::abs(t);
  auto mix = [&](int c) { return static_cast<int>(std::lround(mid[c] + a * (end[c] - mid[c]))); };
  return {mix(0), mix(1), mix(2)};
}

// Strains below this are treated as exact zero so that roundoff does not saturate the color map.
constexpr double kRoundoffStrain = 1e-12;

std::string export_strain_heatmap(const StrainField& field, double scale) {
  if (field.samples.empty()) throw Error("empty strain field");
  const int n = field.n, m = field.m;
  double emax = 0.0;
  Box b;
  for (const StrainSample& s : field.samples) {
    emax = std::max(emax, std::abs(s.E0(0, 0)));
    b.add(s.x);
  }
  const double margin = 2.0;
  auto X = [&](int i, int j) { return field.at(i, j).x; };
  auto corner = [&](int i0, int i1, int j0, int j1) { return 0.25 * (X(i0, j0) + X(i1, j0) + X(i0, j1) + X(i1, j1)); };
  auto xy = [&](const Eigen::Vector2d& p) {
    return fmt_mm((p.x() - b.x0) * scale + margin) + "," + fmt_mm((b.y1 - p.y()) * scale + margin);
  };
  std::string out = svg_header((b.x1 - b.x0) * scale + 2 * margin, (b.y1 - b.y0) * scale + 2 * margin);
  char col[16];
  for (int i = 0; i < n; ++i) {
    const int il = std::max(i - 1, 0), ih = std::min(i + 1, n - 1);
    for (int j = 0; j < m; ++j) {
      const int jl = std::max(j - 1, 0), jh = std::min(j + 1, m - 1);
      const double t = emax > kRoundoffStrain ? field.at(i, j).E0(0, 0) / emax : 0.0;
      const Rgb c = diverging_color(t);
      std::snprintf(col, sizeof col, "#%02x%02x%02x", c.r, c.g, c.b);
      out += "<polygon points=\"" + xy(corner(il, i, jl, j)) + " " + xy(corner(i, ih, jl, j)) + " " +
             xy(corner(i, ih, j, jh)) + " " + xy(corner(il, i, j, jh)) + "\" fill=\"" + col + "\" stroke=\"none\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace stripweave
