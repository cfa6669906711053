#include "holepoint/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "holepoint/error.hpp"

namespace holepoint::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) invalid(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) invalid(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(where + " must be finite");
  return x;
}

double positive(const json& v, const std::string& where) {
  const double x = number(v, where);
  if (!(x > 0.0)) invalid(where + " must be positive");
  return x;
}

std::string string(const json& v, const std::string& where) {
  if (!v.is_string()) invalid(where + " must be a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& where) {
  if (!v.is_boolean()) invalid(where + " must be true or false");
  return v.get<bool>();
}

std::uint64_t count(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    invalid(where + " must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(v.get<std::int64_t>());
}

Vec2 point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) invalid(where + " must be [x, y]");
  return {number(v[0], where), number(v[1], where)};
}

DomainConfig parse_domain(const json& j) {
  check_keys(j, {"kind", "radius", "a", "b", "hole"}, "domain");
  DomainConfig d;
  if (j.contains("kind")) d.kind = string(j["kind"], "domain.kind");
  if (d.kind == "disc") {
    if (j.contains("a") || j.contains("b")) invalid("domain.a/b apply to ellipses only");
    if (j.contains("radius")) d.radius = positive(j["radius"], "domain.radius");
  } else if (d.kind == "ellipse") {
    if (j.contains("radius")) invalid("domain.radius applies to discs only");
    if (!j.contains("a") || !j.contains("b")) invalid("ellipse needs domain.a and domain.b");
    d.a = positive(j["a"], "domain.a");
    d.b = positive(j["b"], "domain.b");
  } else {
    invalid("domain.kind must be disc or ellipse");
  }
  if (j.contains("hole")) {
    check_keys(j["hole"], {"center"}, "domain.hole");
    if (!j["hole"].contains("center")) invalid("domain.hole needs center");
    d.hole_center = point(j["hole"]["center"], "domain.hole.center");
    if (!(d.outer().phi(*d.hole_center) < 0.0)) invalid("hole centre lies outside the domain");
  }
  return d;
}

NonlinearityConfig parse_nonlinearity(const json& j) {
  check_keys(j, {"kind", "form", "a", "b"}, "nonlinearity");
  NonlinearityConfig n;
  if (j.contains("kind")) n.kind = string(j["kind"], "nonlinearity.kind");
  if (n.kind == "torsion" || n.kind == "linear-eigen") {
    if (j.contains("form") || j.contains("a") || j.contains("b")) {
      invalid("nonlinearity." + n.kind + " takes no parameters");
    }
    return n;
  }
  if (n.kind != "custom") invalid("nonlinearity.kind must be torsion, linear-eigen or custom");
  if (!j.contains("form")) invalid("custom nonlinearity needs form");
  n.form = string(j["form"], "nonlinearity.form");
  if (n.form != "affine" && n.form != "exponential") {
    invalid("nonlinearity.form must be affine or exponential");
  }
  if (j.contains("a")) n.a = number(j["a"], "nonlinearity.a");
  if (j.contains("b")) n.b = number(j["b"], "nonlinearity.b");
  return n;
}

HRule parse_h(const json& v) {
  HRule r;
  if (v.is_number()) {
    r.relative = false;
    r.value = positive(v, "h");
    return r;
  }
  const std::string s = string(v, "h");
  if (s.rfind("eps/", 0) != 0) invalid("h must be a number or \"eps/<k>\"");
  try {
    std::size_t used = 0;
    const double k = std::stod(s.substr(4), &used);
    if (used != s.size() - 4 || !(k > 0.0)) invalid("h divisor must be positive");
    r.relative = true;
    r.value = 1.0 / k;
  } catch (const std::logic_error&) {
    invalid("h must be a number or \"eps/<k>\"");
  }
  return r;
}

json h_to_json(const HRule& r) {
  if (!r.relative) return r.value;
  // Written with the shortest round-trip form of the divisor.
  return "eps/" + json(1.0 / r.value).dump();
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::Solve:
      return "solve";
    case Command::Critpoints:
      return "critpoints";
    case Command::Sweep:
      return "sweep";
    case Command::RadialSweep:
      return "radial-sweep";
    case Command::GreenVerify:
      return "green-verify";
    case Command::Predict:
      return "predict";
  }
  return "solve";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Solve, Command::Critpoints, Command::Sweep, Command::RadialSweep,
                    Command::GreenVerify, Command::Predict}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

LevelSetDomain DomainConfig::outer() const {
  return kind == "ellipse" ? LevelSetDomain::ellipse(a, b) : LevelSetDomain::disc(radius);
}

Region DomainConfig::region(double eps) const {
  if (eps > 0.0 && hole_center) return PuncturedDomain(outer(), *hole_center, eps);
  return outer();
}

Nonlinearity NonlinearityConfig::make() const {
  if (kind == "torsion") return Nonlinearity::torsion();
  if (kind == "linear-eigen") return Nonlinearity::linear_eigen();
  const double ca = a, cb = b;
  if (form == "affine") {
    return Nonlinearity::custom([ca, cb](double s) { return ca + cb * s; },
                                [cb](double) { return cb; }, "affine");
  }
  return Nonlinearity::custom([ca, cb](double s) { return ca * std::exp(cb * s); },
                              [ca, cb](double s) { return ca * cb * std::exp(cb * s); },
                              "exponential");
}

double HRule::at(double eps) const { return relative ? value * eps : value; }

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  check_keys(j,
             {"command", "domain", "nonlinearity", "eps_list", "h", "report", "output", "radial",
              "local_data", "seed"},
             "config");
  ExperimentConfig c;
  if (j.contains("command")) {
    c.command = parse_command(string(j["command"], "command"));
    if (!c.command) invalid("unknown command '" + j["command"].get<std::string>() + "'");
  }
  if (j.contains("domain")) c.domain = parse_domain(j["domain"]);
  if (j.contains("nonlinearity")) c.nonlinearity = parse_nonlinearity(j["nonlinearity"]);
  if (j.contains("eps_list")) {
    if (!j["eps_list"].is_array()) invalid("eps_list must be an array");
    for (const auto& v : j["eps_list"]) {
      const double e = number(v, "eps_list entry");
      if (!(e > 0.0 && e < 1.0)) invalid("eps_list entries must lie in (0, 1)");
      c.eps_list.push_back(e);
    }
    std::vector<double> sorted = c.eps_list;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      invalid("eps_list has duplicate entries");
    }
  }
  if (j.contains("h")) c.h = parse_h(j["h"]);
  if (j.contains("report")) {
    const json& r = j["report"];
    check_keys(r, {"margin", "pairing_radius", "runtime", "predictor", "fields"}, "report");
    if (r.contains("margin")) {
      c.report.margin = number(r["margin"], "report.margin");
      if (c.report.margin < 0.0) invalid("report.margin must be >= 0");
    }
    if (r.contains("pairing_radius")) {
      c.report.pairing_radius = positive(r["pairing_radius"], "report.pairing_radius");
    }
    if (r.contains("runtime")) c.report.runtime = boolean(r["runtime"], "report.runtime");
    if (r.contains("fields")) c.report.fields = boolean(r["fields"], "report.fields");
    if (r.contains("predictor")) {
      c.report.predictor = string(r["predictor"], "report.predictor");
      static const std::set<std::string> kinds{"auto", "nondegenerate", "degenerate", "radial"};
      if (!kinds.count(c.report.predictor)) {
        invalid("report.predictor must be auto, nondegenerate, degenerate or radial");
      }
    }
  }
  if (j.contains("output")) {
    check_keys(j["output"], {"csv", "json"}, "output");
    if (j["output"].contains("csv")) c.output.csv = string(j["output"]["csv"], "output.csv");
    if (j["output"].contains("json")) c.output.json = string(j["output"]["json"], "output.json");
  }
  if (j.contains("radial")) {
    check_keys(j["radial"], {"N", "n"}, "radial");
    if (j["radial"].contains("N")) {
      if (!j["radial"]["N"].is_number_integer()) invalid("radial.N must be an integer");
      c.radial.N = j["radial"]["N"].get<int>();
      if (c.radial.N < 2) invalid("radial.N must be at least 2");
    }
    if (j["radial"].contains("n")) {
      c.radial.n = static_cast<std::size_t>(count(j["radial"]["n"], "radial.n"));
    }
  }
  if (j.contains("local_data")) {
    try {
      c.local_data = LocalData::from_json(j["local_data"]);
    } catch (const Error& e) {
      invalid(std::string("local_data: ") + e.what());
    }
  }
  if (j.contains("seed")) {
    c.seed = count(j["seed"], "seed");
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json domain{{"kind", this->domain.kind}};
  if (this->domain.kind == "disc") {
    domain["radius"] = this->domain.radius;
  } else {
    domain["a"] = this->domain.a;
    domain["b"] = this->domain.b;
  }
  if (this->domain.hole_center) {
    domain["hole"] = {{"center", {this->domain.hole_center->x, this->domain.hole_center->y}}};
  }
  json nl{{"kind", nonlinearity.kind}};
  if (nonlinearity.kind == "custom") {
    nl["form"] = nonlinearity.form;
    nl["a"] = nonlinearity.a;
    nl["b"] = nonlinearity.b;
  }
  json j{{"domain", domain},
         {"nonlinearity", nl},
         {"eps_list", eps_list},
         {"h", h_to_json(h)},
         {"report",
          {{"margin", report.margin},
           {"pairing_radius", report.pairing_radius},
           {"runtime", report.runtime},
           {"predictor", report.predictor},
           {"fields", report.fields}}},
         {"output", {{"csv", output.csv}, {"json", output.json}}},
         {"radial", {{"N", radial.N}, {"n", radial.n}}},
         {"seed", seed}};
  if (command) j["command"] = to_string(*command);
  if (local_data) j["local_data"] = local_data->to_json();
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

}  // namespace holepoint::cli
