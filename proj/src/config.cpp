#include "stripweave/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stripweave/analysis.hpp"
#include "stripweave/errors.hpp"

namespace stripweave {

namespace {

using nlohmann::json;

void check_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::pair<double, double> range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [min, max]");
  const double a = number(j[0], where), b = number(j[1], where);
  if (!(a < b)) throw ConfigError(where + ": min must be below max");
  return {a, b};
}

template <class F>
void maybe(const json& obj, const char* key, F&& f) {
  if (obj.contains(key)) f(obj.at(key), std::string(key));
}

SurfaceDefinition parse_surface_spec(const json& j) {
  if (j.is_string()) return parse_surface(j.get<std::string>());
  check_object(j, "surface", {"builtin", "params", "exprs", "domain"});
  if (j.contains("builtin")) {
    if (j.contains("exprs") || j.contains("domain")) throw ConfigError("surface: 'builtin' excludes 'exprs'/'domain'");
    std::map<std::string, double> params;
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw ConfigError("surface.params: expected an object");
      for (const auto& [k, v] : j["params"].items()) params[k] = number(v, "surface.params." + k);
    }
    try {
      return builtin_surface(text(j["builtin"], "surface.builtin"), params);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("surface: ") + e.what());
    }
  }
  if (!j.contains("exprs") || !j.contains("domain")) throw ConfigError("surface: need 'builtin' or 'exprs' + 'domain'");
  if (j.contains("params")) throw ConfigError("surface: 'params' only applies to builtin surfaces");
  const json& ex = j["exprs"];
  if (!ex.is_array() || ex.size() != 3) throw ConfigError("surface.exprs: expected three expressions");
  const json& dom = j["domain"];
  if (!dom.is_array() || dom.size() != 2) throw ConfigError("surface.domain: expected [[u1min,u1max],[u2min,u2max]]");
  const auto r1 = range(dom[0], "surface.domain[0]");
  const auto r2 = range(dom[1], "surface.domain[1]");
  std::ostringstream src;
  src.precision(17);
  src << text(ex[0], "surface.exprs[0]") << " ; " << text(ex[1], "surface.exprs[1]") << " ; "
      << text(ex[2], "surface.exprs[2]") << " ; [" << r1.first << "," << r1.second << "]x[" << r2.first << ","
      << r2.second << "]";
  try {
    return parse_surface(src.str());
  } catch (const Error& e) {
    throw ConfigError(std::string("surface: ") + e.what());
  }
}

}  // namespace

JobConfig parse_config(const json& j) {
  check_object(j, "config", {"surface", "strips", "elasticity", "solver", "export", "validate", "output", "threads"});
  JobConfig c;
  if (!j.contains("surface")) throw ConfigError("config: 'surface' is required");
  c.surface = parse_surface_spec(j["surface"]);

  maybe(j, "strips", [&](const json& s, const std::string&) {
    check_object(s, "strips", {"mode", "u1", "u2", "count", "boundaries", "max_strain", "select"});
    maybe(s, "mode", [&](const json& v, const std::string&) {
      const std::string m = text(v, "strips.mode");
      if (m == "uniform") c.strips.mode = StripMode::Uniform;
      else if (m == "boundaries") c.strips.mode = StripMode::Boundaries;
      else if (m == "auto") c.strips.mode = StripMode::Auto;
      else throw ConfigError("strips.mode: expected uniform, boundaries or auto");
    });
    maybe(s, "u1", [&](const json& v, const std::string&) { c.strips.u1 = range(v, "strips.u1"); });
    maybe(s, "u2", [&](const json& v, const std::string&) { c.strips.u2 = range(v, "strips.u2"); });
    maybe(s, "count", [&](const json& v, const std::string&) { c.strips.count = integer(v, "strips.count"); });
    maybe(s, "max_strain", [&](const json& v, const std::string&) { c.strips.max_strain = number(v, "strips.max_strain"); });
    maybe(s, "boundaries", [&](const json& v, const std::string&) {
      if (!v.is_array()) throw ConfigError("strips.boundaries: expected an array");
      for (const auto& b : v) c.strips.boundaries.push_back(number(b, "strips.boundaries"));
    });
    maybe(s, "select", [&](const json& v, const std::string&) {
      if (!v.is_array()) throw ConfigError("strips.select: expected an array");
      for (const auto& b : v) c.strips.select.push_back(integer(b, "strips.select"));
    });
  });
  if (c.strips.count < 1) throw ConfigError("strips.count must be at least 1");
  if (!(c.strips.max_strain > 0.0)) throw ConfigError("strips.max_strain must be positive");
  if (c.strips.mode == StripMode::Boundaries) {
    const auto& b = c.strips.boundaries;
    if (b.size() < 2) throw ConfigError("strips.boundaries: need at least two values");
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      if (!(b[i] < b[i + 1])) throw ConfigError("strips.boundaries must be strictly increasing");
  }

  maybe(j, "elasticity", [&](const json& e, const std::string&) {
    check_object(e, "elasticity", {"young", "poisson"});
    maybe(e, "young", [&](const json& v, const std::string&) { c.elasticity.young = number(v, "elasticity.young"); });
    maybe(e, "poisson", [&](const json& v, const std::string&) { c.elasticity.poisson = number(v, "elasticity.poisson"); });
  });
  try {
    c.elasticity.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("elasticity: ") + e.what());
  }

  maybe(j, "solver", [&](const json& s, const std::string&) {
    check_object(s, "solver", {"initial_spans", "ode_steps", "p_refine", "bisections", "naturalness_rounds",
                               "naturalness_tol", "max_spans", "pins", "tol_rel", "max_iter", "release_rel",
                               "max_halvings", "quad_extra", "dense_limit"});
    RefinementSchedule& r = c.schedule;
    SolverOptions& o = c.solver;
    maybe(s, "initial_spans", [&](const json& v, const std::string& k) { r.initial_spans = integer(v, "solver." + k); });
    maybe(s, "ode_steps", [&](const json& v, const std::string& k) { r.ode_steps = integer(v, "solver." + k); });
    maybe(s, "p_refine", [&](const json& v, const std::string& k) { r.p_refine = boolean(v, "solver." + k); });
    maybe(s, "bisections", [&](const json& v, const std::string& k) { r.bisections = integer(v, "solver." + k); });
    maybe(s, "naturalness_rounds", [&](const json& v, const std::string& k) { r.naturalness_rounds = integer(v, "solver." + k); });
    maybe(s, "naturalness_tol", [&](const json& v, const std::string& k) { r.naturalness_tol = number(v, "solver." + k); });
    maybe(s, "max_spans", [&](const json& v, const std::string& k) { r.max_spans = integer(v, "solver." + k); });
    maybe(s, "pins", [&](const json& v, const std::string& k) {
      try {
        r.first_pins = pin_mode_from_string(text(v, "solver." + k));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("solver.pins: ") + e.what());
      }
    });
    maybe(s, "tol_rel", [&](const json& v, const std::string& k) { o.tol_rel = number(v, "solver." + k); });
    maybe(s, "max_iter", [&](const json& v, const std::string& k) { o.max_iter = integer(v, "solver." + k); });
    maybe(s, "release_rel", [&](const json& v, const std::string& k) { o.release_rel = number(v, "solver." + k); });
    maybe(s, "max_halvings", [&](const json& v, const std::string& k) { o.max_halvings = integer(v, "solver." + k); });
    maybe(s, "quad_extra", [&](const json& v, const std::string& k) { o.quad_extra = integer(v, "solver." + k); });
    maybe(s, "dense_limit", [&](const json& v, const std::string& k) { o.dense_limit = integer(v, "solver." + k); });
  });
  if (c.schedule.initial_spans < 2) throw ConfigError("solver.initial_spans must be at least 2");
  if (c.schedule.ode_steps < 16) throw ConfigError("solver.ode_steps must be at least 16");
  if (c.schedule.bisections < 0 || c.schedule.naturalness_rounds < 0) throw ConfigError("solver: negative round count");
  if (!(c.solver.tol_rel > 0.0)) throw ConfigError("solver.tol_rel must be positive");
  if (c.solver.max_iter < 1) throw ConfigError("solver.max_iter must be positive");
  if (c.solver.quad_extra < 1) throw ConfigError("solver.quad_extra must be at least 1");

  maybe(j, "export", [&](const json& e, const std::string&) {
    check_object(e, "export", {"scale", "page", "margin", "gap", "stroke_width", "labels", "heatmap", "csv", "samples"});
    ExportSpec& x = c.exporter;
    maybe(e, "scale", [&](const json& v, const std::string&) { x.scale = number(v, "export.scale"); });
    maybe(e, "page", [&](const json& v, const std::string&) {
      if (!v.is_array() || v.size() != 2) throw ConfigError("export.page: expected [width, height] in mm");
      x.page_width = number(v[0], "export.page");
      x.page_height = number(v[1], "export.page");
    });
    maybe(e, "margin", [&](const json& v, const std::string&) { x.margin = number(v, "export.margin"); });
    maybe(e, "gap", [&](const json& v, const std::string&) { x.gap = number(v, "export.gap"); });
    maybe(e, "stroke_width", [&](const json& v, const std::string&) { x.stroke_width = number(v, "export.stroke_width"); });
    maybe(e, "labels", [&](const json& v, const std::string&) { x.labels = boolean(v, "export.labels"); });
    maybe(e, "heatmap", [&](const json& v, const std::string&) { x.heatmap = boolean(v, "export.heatmap"); });
    maybe(e, "csv", [&](const json& v, const std::string&) { x.csv = boolean(v, "export.csv"); });
    maybe(e, "samples", [&](const json& v, const std::string&) {
      if (!v.is_array() || v.size() != 2) throw ConfigError("export.samples: expected [n1, n2]");
      x.samples1 = integer(v[0], "export.samples");
      x.samples2 = integer(v[1], "export.samples");
    });
  });
  if (!(c.exporter.scale > 0.0)) throw ConfigError("export.scale must be positive");
  if (c.exporter.samples1 < 2 || c.exporter.samples2 < 2) throw ConfigError("export.samples must be at least 2");

  maybe(j, "validate", [&](const json& v, const std::string&) {
    check_object(v, "validate", {"strip", "betas", "e11_min_slope", "energy_band", "interior"});
    ValidateSpec& x = c.validate;
    maybe(v, "strip", [&](const json& s, const std::string&) { x.strip = integer(s, "validate.strip"); });
    maybe(v, "betas", [&](const json& s, const std::string&) {
      if (!s.is_array() || s.size() < 2) throw ConfigError("validate.betas: need at least two values");
      x.betas.clear();
      for (const auto& b : s) x.betas.push_back(number(b, "validate.betas"));
    });
    maybe(v, "e11_min_slope", [&](const json& s, const std::string&) { x.e11_min_slope = number(s, "validate.e11_min_slope"); });
    maybe(v, "energy_band", [&](const json& s, const std::string&) { x.energy_band = range(s, "validate.energy_band"); });
    maybe(v, "interior", [&](const json& s, const std::string&) { x.interior = number(s, "validate.interior"); });
  });
  for (std::size_t i = 0; i < c.validate.betas.size(); ++i) {
    if (!(c.validate.betas[i] > 0.0) || (i > 0 && !(c.validate.betas[i] < c.validate.betas[i - 1])))
      throw ConfigError("validate.betas must be positive and decreasing");
  }
  if (!(c.validate.interior > 0.0 && c.validate.interior <= 1.0)) throw ConfigError("validate.interior must be in (0, 1]");

  maybe(j, "output", [&](const json& v, const std::string&) { c.output = text(v, "output"); });
  maybe(j, "threads", [&](const json& v, const std::string&) { c.threads = integer(v, "threads"); });
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  return c;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

std::vector<StripDomain> plan_strips(const JobConfig& cfg) {
  const ParamRect& d = cfg.surface.domain();
  const auto [u1a, u1b] = cfg.strips.u1.value_or(std::make_pair(d.u1_min, d.u1_max));
  const auto [lo, hi] = cfg.strips.u2.value_or(std::make_pair(d.u2_min, d.u2_max));
  std::vector<double> b;
  switch (cfg.strips.mode) {
    case StripMode::Uniform:
      for (int i = 0; i <= cfg.strips.count; ++i) b.push_back(i == cfg.strips.count ? hi : lo + (hi - lo) * i / cfg.strips.count);
      break;
    case StripMode::Boundaries:
      b = cfg.strips.boundaries;
      break;
    case StripMode::Auto: {
      const SurfaceDefinition clipped(cfg.surface.coords(), ParamRect{u1a, u1b, d.u2_min, d.u2_max}, cfg.surface.name());
      b = suggest_partition(clipped, lo, hi, cfg.strips.max_strain).boundaries;
      break;
    }
  }
  std::vector<StripDomain> out;
  try {
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      out.emplace_back(cfg.surface, u1a, u1b, 0.5 * (b[i] + b[i + 1]), 0.5 * (b[i + 1] - b[i]), static_cast<int>(i));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("strips: ") + e.what());
  }
  return out;
}

std::vector<int> selected_strips(const JobConfig& cfg, int total) {
  if (cfg.strips.select.empty()) {
    std::vector<int> all(total);
    for (int i = 0; i < total; ++i) all[i] = i;
    return all;
  }
  for (int i : cfg.strips.select)
    if (i < 0 || i >= total) throw ConfigError("strips.select: index " + std::to_string(i) + " out of range");
  return cfg.strips.select;
}

}  // namespace stripweave
