#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stripweave/elasticity.hpp"
#include "stripweave/geometry.hpp"
#include "stripweave/solver.hpp"
#include "stripweave/surface.hpp"

namespace stripweave {

enum class StripMode { Uniform, Boundaries, Auto };

struct StripSpec {
  StripMode mode = StripMode::Uniform;
  std::optional<std::pair<double, double>> u1;  // defaults to the surface domain
  std::optional<std::pair<double, double>> u2;
  int count = 1;
  std::vector<double> boundaries;
  double max_strain = 0.01;
  std::vector<int> select;  // empty = all strips
};

struct ExportSpec {
  double scale = 100.0;
  double page_width = 210.0;
  double page_height = 297.0;
  double margin = 10.0;
  double gap = 4.0;
  double stroke_width = 0.2;
  bool labels = true;
  bool heatmap = true;
  bool csv = true;
  int samples1 = 101;
  int samples2 = 9;
};

struct ValidateSpec {
  int strip = 0;
  std::vector<double> betas = {1.0, 0.5, 0.25};
  double e11_min_slope = 2.5;
  std::pair<double, double> energy_band = {4.5, 5.5};
  double interior = 0.8;
};

struct JobConfig {
  SurfaceDefinition surface = builtin_surface("plane");
  StripSpec strips;
  ElasticityParams elasticity;
  RefinementSchedule schedule;
  SolverOptions solver;
  ExportSpec exporter;
  ValidateSpec validate;
  std::string output = "out";
  int threads = 1;
};

/// Throws ConfigError on schema violations (unknown keys included).
JobConfig parse_config(const nlohmann::json& j);
JobConfig load_config(const std::string& path);

/// Strips described by the config, in index order. Auto mode runs
/// suggest_partition.
std::vector<StripDomain> plan_strips(const JobConfig& cfg);

/// Indices of the strips to solve / export.
std::vector<int> selected_strips(const JobConfig& cfg, int total);

}  // namespace stripweave
