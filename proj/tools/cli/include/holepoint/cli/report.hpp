#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "holepoint/vec.hpp"

namespace holepoint::cli {

/// One eps of a run. Fields a command does not produce stay empty.
struct SweepRecord {
  double eps = 0.0;
  double h = 0.0;
  /// "Code: message" when this entry failed.
  std::optional<std::string> error;

  std::optional<int> crit_count;
  std::optional<int> index_sum;
  /// PASS, FAIL or INAPPLICABLE.
  std::optional<std::string> audit;
  /// CritSet JSON array.
  nlohmann::json points;
  nlohmann::json rings;
  nlohmann::json prediction;

  /// Detected point matched to the first predicted point.
  std::optional<Vec2> saddle;
  std::optional<Vec2> predicted;
  std::optional<double> saddle_value;
  std::optional<double> err_abs;
  std::optional<double> err_rel;
  std::optional<double> align_deg;
  /// One entry per predicted point: detected match, class and errors.
  nlohmann::json matches;
  /// Sup of |u_eps - expansion| on the circle |x - P| = 3 eps.
  std::optional<double> expansion_error;

  /// Command-specific extras (solve meta, radial results, green checks).
  nlohmann::json details;
  double runtime_s = 0.0;

  nlohmann::json to_json() const;
  static SweepRecord from_json(const nlohmann::json& j);
};

struct FitRecord {
  std::string law;
  double exponent = 0.0;
  VecN c;
  double residual = 0.0;
  /// Constant implied by the predictor, for comparison.
  VecN c_predicted;

  nlohmann::json to_json() const;
  static FitRecord from_json(const nlohmann::json& j);
};

struct SweepReport {
  std::string command;
  std::string version;
  std::string build_hash;
  nlohmann::json config;
  /// Data of the unperturbed problem (local data at P, its critical set).
  nlohmann::json reference;
  /// Sorted by decreasing eps.
  std::vector<SweepRecord> records;
  std::optional<FitRecord> fit;
  /// Why no fit was made, when it was attempted.
  std::optional<std::string> fit_error;

  bool has_failures() const;

  nlohmann::json to_json() const;
  static SweepReport from_json(const nlohmann::json& j);
};

/// Columns eps,h,crit_count,index_sum,sad_x,sad_y,pred_x,pred_y,err_abs,
/// err_rel,align_deg,runtime_s. Missing values are empty cells. Throws
/// IoError.
void emit_csv(const SweepReport& report, const std::string& path);
/// Columns eps,r_eps,ratio_to_law,pred_printed,pred_cross,newton_iters.
void emit_radial_csv(const SweepReport& report, const std::string& path);
/// Pretty-printed with sorted keys. Throws IoError.
void emit_json(const SweepReport& report, const std::string& path);
SweepReport read_json_report(const std::string& path);

/// 17 significant digits with '.' as decimal separator whatever the locale.
std::string format_double(double v);

}  // namespace holepoint::cli
