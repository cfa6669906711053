#include "holepoint/cli/report.hpp"

#include <charconv>
#include <fstream>

#include "holepoint/error.hpp"

namespace holepoint::cli {

namespace {

using json = nlohmann::json;

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json opt_point(const std::optional<Vec2>& v) {
  return v ? json::array({v->x, v->y}) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

std::optional<Vec2> get_point(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return Vec2{j[key][0].get<double>(), j[key][1].get<double>()};
}

json value_or_null(const json& j, const char* key) {
  return j.contains(key) ? j[key] : json(nullptr);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string cell(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

std::string point_cells(const std::optional<Vec2>& v) {
  return v ? format_double(v->x) + ',' + format_double(v->y) : std::string(",");
}

std::string detail_cell(const json& details, const char* key) {
  if (!details.is_object() || !details.contains(key) || details[key].is_null()) return {};
  const json& v = details[key];
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return format_double(v.get<double>());
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

json SweepRecord::to_json() const {
  return {{"eps", eps},
          {"h", h},
          {"error", opt(error)},
          {"crit_count", opt(crit_count)},
          {"index_sum", opt(index_sum)},
          {"audit", opt(audit)},
          {"points", points},
          {"rings", rings},
          {"prediction", prediction},
          {"saddle", opt_point(saddle)},
          {"predicted", opt_point(predicted)},
          {"saddle_value", opt(saddle_value)},
          {"err_abs", opt(err_abs)},
          {"err_rel", opt(err_rel)},
          {"align_deg", opt(align_deg)},
          {"matches", matches},
          {"expansion_error", opt(expansion_error)},
          {"details", details},
          {"runtime_s", runtime_s}};
}

SweepRecord SweepRecord::from_json(const json& j) {
  SweepRecord r;
  r.eps = j.at("eps").get<double>();
  r.h = j.at("h").get<double>();
  r.error = get_opt<std::string>(j, "error");
  r.crit_count = get_opt<int>(j, "crit_count");
  r.index_sum = get_opt<int>(j, "index_sum");
  r.audit = get_opt<std::string>(j, "audit");
  r.points = value_or_null(j, "points");
  r.rings = value_or_null(j, "rings");
  r.prediction = value_or_null(j, "prediction");
  r.saddle = get_point(j, "saddle");
  r.predicted = get_point(j, "predicted");
  r.saddle_value = get_opt<double>(j, "saddle_value");
  r.err_abs = get_opt<double>(j, "err_abs");
  r.err_rel = get_opt<double>(j, "err_rel");
  r.align_deg = get_opt<double>(j, "align_deg");
  r.matches = value_or_null(j, "matches");
  r.expansion_error = get_opt<double>(j, "expansion_error");
  r.details = value_or_null(j, "details");
  r.runtime_s = j.at("runtime_s").get<double>();
  return r;
}

json FitRecord::to_json() const {
  return {{"law", law},
          {"exponent", exponent},
          {"c", c},
          {"residual", residual},
          {"c_predicted", c_predicted}};
}

FitRecord FitRecord::from_json(const json& j) {
  FitRecord f;
  f.law = j.at("law").get<std::string>();
  f.exponent = j.at("exponent").get<double>();
  f.c = j.at("c").get<VecN>();
  f.residual = j.at("residual").get<double>();
  f.c_predicted = j.at("c_predicted").get<VecN>();
  return f;
}

bool SweepReport::has_failures() const {
  for (const auto& r : records) {
    if (r.error) return true;
  }
  return false;
}

json SweepReport::to_json() const {
  json recs = json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  return {{"command", command},
          {"environment", {{"version", version}, {"build_hash", build_hash}}},
          {"config", config},
          {"reference", reference},
          {"records", recs},
          {"fit", fit ? fit->to_json() : json(nullptr)},
          {"fit_error", opt(fit_error)}};
}

SweepReport SweepReport::from_json(const json& j) {
  SweepReport rep;
  rep.command = j.at("command").get<std::string>();
  rep.version = j.at("environment").at("version").get<std::string>();
  rep.build_hash = j.at("environment").at("build_hash").get<std::string>();
  rep.config = value_or_null(j, "config");
  rep.reference = value_or_null(j, "reference");
  for (const auto& r : j.at("records")) rep.records.push_back(SweepRecord::from_json(r));
  if (j.contains("fit") && !j["fit"].is_null()) rep.fit = FitRecord::from_json(j["fit"]);
  rep.fit_error = get_opt<std::string>(j, "fit_error");
  return rep;
}

void emit_csv(const SweepReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "eps,h,crit_count,index_sum,sad_x,sad_y,pred_x,pred_y,err_abs,err_rel,align_deg,runtime_s\n";
  for (const auto& r : report.records) {
    out << format_double(r.eps) << ',' << format_double(r.h) << ',' << cell(r.crit_count) << ','
        << cell(r.index_sum) << ',' << point_cells(r.saddle) << ',' << point_cells(r.predicted)
        << ',' << cell(r.err_abs) << ',' << cell(r.err_rel) << ',' << cell(r.align_deg) << ','
        << format_double(r.runtime_s) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

void emit_radial_csv(const SweepReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "eps,r_eps,ratio_to_law,pred_printed,pred_cross,newton_iters\n";
  for (const auto& r : report.records) {
    out << format_double(r.eps) << ',' << detail_cell(r.details, "r_eps") << ','
        << detail_cell(r.details, "ratio_to_law") << ',' << detail_cell(r.details, "pred_printed")
        << ',' << detail_cell(r.details, "pred_cross") << ','
        << detail_cell(r.details, "newton_iters") << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

void emit_json(const SweepReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << report.to_json().dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

SweepReport read_json_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  return SweepReport::from_json(json::parse(in));
}

}  // namespace holepoint::cli
