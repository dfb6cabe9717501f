#include "stripweave/surface.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <vector>

namespace stripweave {

SurfaceDefinition::SurfaceDefinition(std::array<Expr, 3> coords, ParamRect domain, std::string name)
    : coords_(std::move(coords)), domain_(domain), name_(std::move(name)) {
  for (const auto& c : coords_) {
    if (!c) throw Error("surface coordinate expression is null");
  }
  if (!(domain_.u1_min < domain_.u1_max) || !(domain_.u2_min < domain_.u2_max)) {
    throw DomainError("surface domain must be a non-empty rectangle");
  }
}

namespace {

std::string format_bound(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Piece {
  std::string_view text;
  std::size_t offset;
};

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Pieces are separated by ';' when the text contains one, otherwise by
// newlines. In newline mode blank lines are ignored; in ';' mode a blank piece
// is kept so it is reported as an empty expression.
std::vector<Piece> split_pieces(std::string_view text) {
  const char sep = text.find(';') != std::string_view::npos ? ';' : '\n';
  std::vector<Piece> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back({text.substr(start, i - start), start});
      start = i + 1;
    }
  }
  if (sep == '\n') {
    std::erase_if(out, [](const Piece& p) { return is_blank(p.text); });
  } else if (out.size() > 1 && is_blank(out.back().text)) {
    out.pop_back();
  }
  return out;
}

double constant_bound(std::string_view text, std::size_t offset) {
  Expr e = parse_expression(text, offset);
  if (depends_on_variables(*e)) throw ParseError("domain bound must be constant", offset);
  const double v = evaluate(e, 0.0, 0.0);
  if (!std::isfinite(v)) throw ParseError("domain bound is not finite", offset);
  return v;
}

// "[a,b]x[c,d]"
ParamRect parse_domain(std::string_view text, std::size_t base) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](char c) {
    skip();
    if (pos >= text.size() || text[pos] != c) {
      throw ParseError(std::string("domain clause: expected '") + c + "'", base + pos);
    }
    ++pos;
  };
  auto until = [&](char stop) {
    const std::size_t start = pos;
    int depth = 0;
    while (pos < text.size()) {
      const char c = text[pos];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (depth == 0 && c == stop) break;
      ++pos;
    }
    if (pos >= text.size()) throw ParseError(std::string("domain clause: expected '") + stop + "'", base + pos);
    return constant_bound(text.substr(start, pos - start), base + start);
  };
  ParamRect r;
  expect('[');
  r.u1_min = until(',');
  expect(',');
  r.u1_max = until(']');
  expect(']');
  expect('x');
  expect('[');
  r.u2_min = until(',');
  expect(',');
  r.u2_max = until(']');
  expect(']');
  skip();
  if (pos != text.size()) throw ParseError("trailing characters after domain clause", base + pos);
  if (!(r.u1_min < r.u1_max) || !(r.u2_min < r.u2_max)) {
    throw ParseError("domain intervals must satisfy min < max", base);
  }
  return r;
}

}  // namespace

std::string SurfaceDefinition::to_text() const {
  return to_string(coords_[0]) + " ; " + to_string(coords_[1]) + " ; " + to_string(coords_[2]) + " ; [" +
         format_bound(domain_.u1_min) + "," + format_bound(domain_.u1_max) + "]x[" + format_bound(domain_.u2_min) +
         "," + format_bound(domain_.u2_max) + "]";
}

SurfaceDefinition parse_surface(std::string_view text) {
  const std::vector<Piece> pieces = split_pieces(text);
  if (pieces.size() != 4) {
    throw ParseError("surface text needs three expressions and a domain clause, got " +
                         std::to_string(pieces.size()) + " parts",
                     0);
  }
  std::array<Expr, 3> coords;
  for (int k = 0; k < 3; ++k) coords[k] = parse_expression(pieces[k].text, pieces[k].offset);
  return SurfaceDefinition(coords, parse_domain(pieces[3].text, pieces[3].offset));
}

SurfaceDefinition builtin_surface(std::string_view name, const std::map<std::string, double>& params) {
  std::string exprs;
  ParamRect domain{-1.0, 1.0, -1.0, 1.0};
  bool takes_radius = false;
  double radius = 1.0;
  if (auto it = params.find("radius"); it != params.end()) radius = it->second;

  if (name == "plane") {
    exprs = "u1 ; u2 ; 0";
  } else if (name == "paraboloid") {
    exprs = "u1 ; u2 ; u1^2 + u2^2";
  } else if (name == "hyperbolic_paraboloid") {
    exprs = "u1 ; u2 ; u1^2 - u2^2";
  } else if (name == "catenoid") {
    exprs = "cosh(u2)*cos(u1) ; cosh(u2)*sin(u1) ; u2";
    domain = {-std::numbers::pi, std::numbers::pi, -std::numbers::pi / 2, std::numbers::pi / 2};
  } else if (name == "helicoid") {
    exprs = "sinh(u2)*cos(u1) ; sinh(u2)*sin(u1) ; u1";
    domain = {-std::numbers::pi, std::numbers::pi, -std::numbers::pi / 2, std::numbers::pi / 2};
  } else if (name == "sphere_patch") {
    // u1 longitude, u2 colatitude; the default patch stays clear of the poles.
    takes_radius = true;
    if (!(std::isfinite(radius) && radius > 0.0)) throw ConfigError("sphere_patch: radius must be positive");
    const std::string r = format_bound(radius);
    exprs = r + "*sin(u2)*cos(u1) ; " + r + "*sin(u2)*sin(u1) ; " + r + "*cos(u2)";
    domain = {-std::numbers::pi, std::numbers::pi, std::numbers::pi / 6, 5 * std::numbers::pi / 6};
  } else {
    throw ConfigError("unknown builtin surface '" + std::string(name) + "'");
  }

  for (const auto& [key, value] : params) {
    if (!std::isfinite(value)) throw ConfigError("parameter '" + key + "' is not finite");
    if (key == "u1_min") {
      domain.u1_min = value;
    } else if (key == "u1_max") {
      domain.u1_max = value;
    } else if (key == "u2_min") {
      domain.u2_min = value;
    } else if (key == "u2_max") {
      domain.u2_max = value;
    } else if (key == "radius" && takes_radius) {
      // handled above
    } else {
      throw ConfigError("surface '" + std::string(name) + "' has no parameter '" + key + "'");
    }
  }
  if (!(domain.u1_min < domain.u1_max) || !(domain.u2_min < domain.u2_max)) {
    throw ConfigError("surface '" + std::string(name) + "': invalid domain override");
  }
  SurfaceDefinition parsed = parse_surface(exprs + " ; [0,1]x[0,1]");
  return SurfaceDefinition(parsed.coords(), domain, std::string(name));
}

Jet2 evaluate_jet2(const SurfaceDefinition& def, double u1, double u2) {
  if (!def.domain().contains(u1, u2)) {
    throw DomainError("point (" + std::to_string(u1) + ", " + std::to_string(u2) + ") outside surface domain");
  }
  const Dual2 x = Dual2::variable(0, u1);
  const Dual2 y = Dual2::variable(1, u2);
  Jet2 jet;
  for (int k = 0; k < 3; ++k) {
    const Dual2 r = evaluate(*def.coords()[k], x, y);
    jet.p[k] = r.v;
    jet.p1[k] = r.d[0];
    jet.p2[k] = r.d[1];
    jet.p11[k] = r.h(0, 0);
    jet.p12[k] = r.h(0, 1);
    jet.p22[k] = r.h(1, 1);
  }
  const bool finite = jet.p.allFinite() && jet.p1.allFinite() && jet.p2.allFinite() && jet.p11.allFinite() &&
                      jet.p12.allFinite() && jet.p22.allFinite();
  if (!finite) throw DomainError("non-finite surface jet");
  return jet;
}

Eigen::Vector3d evaluate_point(const SurfaceDefinition& def, double u1, double u2) {
  if (!def.domain().contains(u1, u2)) throw DomainError("point outside surface domain");
  Eigen::Vector3d p;
  for (int k = 0; k < 3; ++k) p[k] = evaluate(def.coords()[k], u1, u2);
  if (!p.allFinite()) throw DomainError("non-finite surface point");
  return p;
}

}  // namespace stripweave
