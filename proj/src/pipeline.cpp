#include "stripweave/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "stripweave/analysis.hpp"
#include "stripweave/errors.hpp"
#include "stripweave/export.hpp"
#include "stripweave/log.hpp"

namespace stripweave {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string out_dir(const JobConfig& cfg, const RunOptions& opt) { return opt.out_dir.empty() ? cfg.output : opt.out_dir; }
int thread_count(const JobConfig& cfg, const RunOptions& opt) { return opt.threads > 0 ? opt.threads : cfg.threads; }

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  f << content;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("missing checkpoint '" + p.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("unreadable checkpoint '" + p.string() + "': " + e.what());
  }
}

fs::path checkpoint_path(const std::string& dir, int i) { return fs::path(dir) / ("strip_" + std::to_string(i) + ".json"); }

// Runs fn(k) for k in [0, count) on `threads` workers; results are indexed, so
// the output order never depends on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) fn(k);
    });
  }
  for (auto& th : pool) th.join();
}

double max_abs_e11(const StrainField& f) {
  double m = 0.0;
  for (const StrainSample& s : f.samples) m = std::max(m, std::abs(s.E0(0, 0)));
  return m;
}

bool matches_strip(const BSplineManifold2D& m, const StripDomain& s) {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); };
  return close(m.space1().lower(), s.u1a()) && close(m.space1().upper(), s.u1b()) &&
         close(m.space2().lower(), s.u2_min()) && close(m.space2().upper(), s.u2_max());
}

}  // namespace

int cmd_plan(const JobConfig& cfg, const RunOptions& opt, std::ostream& out) {
  const std::vector<StripDomain> strips = plan_strips(cfg);
  nlohmann::json rows = nlohmann::json::array();
  bool exceeded = false;
  char line[256];
  std::snprintf(line, sizeof line, "%5s %12s %12s %12s %12s %12s %12s\n", "strip", "u2 from", "u2 to", "K min", "K max",
                "B max", "peak E11");
  out << line;
  for (const StripDomain& s : strips) {
    const StrainPrediction p = predict_strip(s);
    exceeded = exceeded || p.peak > cfg.strips.max_strain;
    std::snprintf(line, sizeof line, "%5d %12.6g %12.6g %12.6g %12.6g %12.6g %12.6g%s\n", s.index(), s.u2_min(),
                  s.u2_max(), p.k_min, p.k_max, p.b_max, p.peak, p.peak > cfg.strips.max_strain ? "  !" : "");
    out << line;
    rows.push_back({{"index", s.index()},
                    {"u1", {s.u1a(), s.u1b()}},
                    {"center", s.center()},
                    {"half_breadth", s.half_breadth()},
                    {"k_min", p.k_min},
                    {"k_max", p.k_max},
                    {"b_max", p.b_max},
                    {"peak_e11", p.peak}});
  }
  const std::string dir = out_dir(cfg, opt);
  fs::create_directories(dir);
  nlohmann::json j = {{"surface", cfg.surface.to_text()}, {"max_strain", cfg.strips.max_strain}, {"strips", rows}};
  write_file(fs::path(dir) / "plan.json", j.dump(2) + "\n");
  if (exceeded) {
    out << "predicted peak strain exceeds " << fmt("%g", cfg.strips.max_strain) << "\n";
    return exit_code::threshold;
  }
  return exit_code::ok;
}

int cmd_solve(const JobConfig& cfg, const RunOptions& opt, std::ostream& out) {
  const std::vector<StripDomain> strips = plan_strips(cfg);
  const std::vector<int> sel = selected_strips(cfg, static_cast<int>(strips.size()));
  const std::string dir = out_dir(cfg, opt);
  fs::create_directories(dir);
  const int threads = thread_count(cfg, opt);

  SolverOptions so = cfg.solver;
  so.threads = sel.size() == 1 ? threads : 1;

  std::vector<std::string> lines(sel.size());
  std::vector<char> failed(sel.size(), 0);
  parallel_for(static_cast<int>(sel.size()), sel.size() == 1 ? 1 : threads, [&](int k) {
    const StripDomain& strip = strips[sel[k]];
    const int i = strip.index();
    try {
      std::optional<BSplineManifold2D> seed;
      const fs::path ck = checkpoint_path(dir, i);
      if (opt.resume && fs::exists(ck)) {
        BSplineManifold2D m = manifold_from_json(read_json(ck));
        if (matches_strip(m, strip)) seed = std::move(m);
        else log(LogLevel::Warn, "strip " + std::to_string(i) + ": checkpoint does not match the strip, solving afresh");
      }
      log(LogLevel::Info, "strip " + std::to_string(i) + ": solving" + (seed ? " from checkpoint" : ""));
      const EmbeddingResult res = solve_embedding(strip, cfg.elasticity, cfg.schedule, so, seed);
      const StrainField field = strain_field(strip, cfg.elasticity, res.manifold, cfg.exporter.samples1, cfg.exporter.samples2);
      int iterations = 0;
      for (const StageReport& s : res.stages) {
        iterations += s.iterations;
        log(LogLevel::Debug, "strip " + std::to_string(i) + ": stage " + s.name + " W=" + fmt("%.6e", s.energy) +
                                 " iterations=" + std::to_string(s.iterations));
      }
      nlohmann::json diag = {{"strip", i},
                             {"center", strip.center()},
                             {"half_breadth", strip.half_breadth()},
                             {"energy", res.energy},
                             {"converged", res.converged},
                             {"iterations", iterations},
                             {"max_abs_e11", max_abs_e11(field)},
                             {"stages", to_json(res.stages)}};
      write_file(ck, to_json(res.manifold).dump(2) + "\n");
      write_file(fs::path(dir) / ("strip_" + std::to_string(i) + ".diag.json"), diag.dump(2) + "\n");
      lines[k] = "strip " + std::to_string(i) + ": iterations " + std::to_string(iterations) + ", W " +
                 fmt("%.6e", res.energy) + ", max|E11| " + fmt("%.6e", max_abs_e11(field));
    } catch (const Error& e) {
      failed[k] = 1;
      lines[k] = "strip " + std::to_string(i) + ": FAILED: " + e.what();
      log(LogLevel::Error, lines[k]);
    }
  });
  bool any_failed = false;
  for (std::size_t k = 0; k < sel.size(); ++k) {
    out << lines[k] << "\n";
    any_failed = any_failed || failed[k];
  }
  return any_failed ? exit_code::solver : exit_code::ok;
}

int cmd_export(const JobConfig& cfg, const RunOptions& opt, std::ostream& out) {
  const std::vector<StripDomain> strips = plan_strips(cfg);
  const std::vector<int> sel = selected_strips(cfg, static_cast<int>(strips.size()));
  const std::string dir = out_dir(cfg, opt);
  std::vector<BSplineManifold2D> ms;
  std::vector<std::string> labels;
  for (int i : sel) {
    ms.push_back(manifold_from_json(read_json(checkpoint_path(dir, i))));
    labels.push_back(std::to_string(i));
  }
  const ExportSpec& x = cfg.exporter;
  KitLayout layout;
  layout.page_width = x.page_width;
  layout.page_height = x.page_height;
  layout.margin = x.margin;
  layout.gap = x.gap;
  layout.scale = x.scale;
  layout.stroke_width = x.stroke_width;
  layout.labels = x.labels;
  Kit kit;
  try {
    kit = export_kit(ms, layout, labels);
  } catch (const Error& e) {
    throw ConfigError(std::string("export: ") + e.what());
  }
  for (std::size_t p = 0; p < kit.pages.size(); ++p)
    write_file(fs::path(dir) / ("kit_page_" + std::to_string(p + 1) + ".svg"), kit.pages[p]);

  SvgStyle style;
  style.scale = x.scale;
  style.margin = 2.0;
  style.stroke_width = x.stroke_width;
  std::vector<std::string> written(sel.size());
  parallel_for(static_cast<int>(sel.size()), thread_count(cfg, opt), [&](int k) {
    const int i = sel[k];
    const std::string stem = "strip_" + std::to_string(i);
    write_file(fs::path(dir) / (stem + ".svg"), export_strip_svg(ms[k], style));
    if (x.heatmap || x.csv) {
      const StrainField f = strain_field(strips[i], cfg.elasticity, ms[k], x.samples1, x.samples2);
      if (x.heatmap) write_file(fs::path(dir) / (stem + "_strain.svg"), export_strain_heatmap(f, x.scale));
      if (x.csv) write_file(fs::path(dir) / (stem + "_strain.csv"), export_strain_csv(f));
    }
  });
  out << "exported " << sel.size() << " strips on " << kit.pages.size() << " page(s) to " << dir << "\n";
  return exit_code::ok;
}

int cmd_validate(const JobConfig& cfg, const RunOptions& opt, std::ostream& out) {
  const std::vector<StripDomain> strips = plan_strips(cfg);
  const ValidateSpec& v = cfg.validate;
  if (v.strip < 0 || v.strip >= static_cast<int>(strips.size())) throw ConfigError("validate.strip out of range");
  const StripDomain& base = strips[v.strip];
  std::vector<BetaRun> runs(v.betas.size());
  std::vector<std::string> errors(v.betas.size());
  SolverOptions so = cfg.solver;
  so.threads = 1;
  parallel_for(static_cast<int>(v.betas.size()), thread_count(cfg, opt), [&](int k) {
    try {
      const StripDomain s = base.narrowed(v.betas[k]);
      const EmbeddingResult res = solve_embedding(s, cfg.elasticity, cfg.schedule, so);
      runs[k] = measure_run(s, cfg.elasticity, res.manifold, v.betas[k], res.energy, 161, 17, v.interior);
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  });
  for (const std::string& e : errors)
    if (!e.empty()) throw SolverError(e);
  const ScalingReport rep = validate_appendix(runs, v.e11_min_slope, v.energy_band);
  const std::string dir = out_dir(cfg, opt);
  fs::create_directories(dir);
  const std::string table = to_table(rep);
  write_file(fs::path(dir) / "validate.json", to_json(rep).dump(2) + "\n");
  write_file(fs::path(dir) / "validate.txt", table);
  out << table;
  return rep.passed() ? exit_code::ok : exit_code::failure;
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& out) {
  try {
    if (command != "plan" && command != "solve" && command != "export" && command != "validate") {
      std::cerr << "unknown command '" << command << "'\n";
      return exit_code::usage;
    }
    const JobConfig cfg = load_config(config_path);
    if (command == "plan") return cmd_plan(cfg, opt, out);
    if (command == "solve") return cmd_solve(cfg, opt, out);
    if (command == "export") return cmd_export(cfg, opt, out);
    return cmd_validate(cfg, opt, out);
  } catch (const InputError& e) {
    log(LogLevel::Error, e.what());
    return exit_code::missing_input;
  } catch (const ConfigError& e) {
    log(LogLevel::Error, e.what());
    return exit_code::usage;
  } catch (const ParseError& e) {
    log(LogLevel::Error, e.what());
    return exit_code::usage;
  } catch (const std::exception& e) {
    log(LogLevel::Error, e.what());
    return exit_code::solver;
  }
}

}  // namespace stripweave
