#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "holepoint/asymptotics.hpp"
#include "holepoint/elliptic.hpp"
#include "holepoint/geometry.hpp"

namespace holepoint::cli {

enum class Command { Solve, Critpoints, Sweep, RadialSweep, GreenVerify, Predict };

std::string to_string(Command command);
std::optional<Command> parse_command(std::string_view name);

struct DomainConfig {
  /// "disc" or "ellipse".
  std::string kind = "disc";
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  std::optional<Vec2> hole_center;

  LevelSetDomain outer() const;
  /// The outer domain, punctured at hole_center when eps > 0.
  Region region(double eps) const;
};

/// torsion, linear-eigen, or custom with form "affine" (f = a + b s) or
/// "exponential" (f = a exp(b s)).
struct NonlinearityConfig {
  std::string kind = "torsion";
  std::string form;
  double a = 1.0;
  double b = 0.0;

  Nonlinearity make() const;
};

/// Grid spacing per eps: an absolute value, or eps times a factor ("eps/4").
struct HRule {
  bool relative = true;
  double value = 0.25;

  double at(double eps) const;
};

struct ReportOptions {
  /// 0 selects 3h.
  double margin = 0.0;
  /// Radius for pairing critical points of u_eps with those of u0.
  double pairing_radius = 0.1;
  /// When false runtime_s is written as 0 so reports are byte-stable.
  bool runtime = true;
  /// auto, nondegenerate, degenerate or radial.
  std::string predictor = "auto";
  /// Write solved fields next to the report (solve command).
  bool fields = true;
};

struct OutputConfig {
  std::string csv = "report.csv";
  std::string json = "report.json";
};

struct RadialConfig {
  int N = 2;
  /// 0 selects the default mesh.
  std::size_t n = 0;
};

struct ExperimentConfig {
  std::optional<Command> command;
  DomainConfig domain;
  NonlinearityConfig nonlinearity;
  std::vector<double> eps_list;
  HRule h;
  ReportOptions report;
  OutputConfig output;
  RadialConfig radial;
  std::optional<LocalData> local_data;
  std::uint64_t seed = 0;

  /// Throws ConfigInvalid on unknown keys, wrong types or values out of range.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Reads and validates a config file. Throws ConfigInvalid (IoError when the
/// file cannot be read).
ExperimentConfig load_config(const std::string& path);

}  // namespace holepoint::cli
