#include "holepoint/cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include "holepoint/asymptotics.hpp"
#include "holepoint/critpoints.hpp"
#include "holepoint/elliptic.hpp"
#include "holepoint/error.hpp"
#include "holepoint/green.hpp"
#include "holepoint/radial.hpp"

#ifndef HOLEPOINT_VERSION
#define HOLEPOINT_VERSION "0.0.0"
#endif
#ifndef HOLEPOINT_BUILD_HASH
#define HOLEPOINT_BUILD_HASH "unknown"
#endif

namespace holepoint::cli {

namespace {

using json = nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr int kExpansionProbes = 64;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> descending(std::vector<double> eps) {
  std::sort(eps.begin(), eps.end(), std::greater<>());
  return eps;
}

Vec2 to_vec2(const VecN& v) { return {v.at(0), v.at(1)}; }

double angle_deg(Vec2 a, Vec2 b) {
  return std::atan2(std::abs(cross(a, b)), dot(a, b)) * 180.0 / kPi;
}

// Runs body for one record; holepoint errors become the record's error.
void guarded(SweepRecord& rec, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
}

SweepReport new_report(const ExperimentConfig& config, Command command) {
  SweepReport rep;
  rep.command = to_string(command);
  rep.version = version();
  rep.build_hash = build_hash();
  rep.config = config.to_json();
  rep.config["command"] = rep.command;
  return rep;
}

// eps values of a 2D command: the eps list with a hole, one unpunctured case
// otherwise.
std::vector<double> cases(const ExperimentConfig& c) {
  if (c.domain.hole_center) {
    if (c.eps_list.empty()) invalid("a domain with a hole needs eps_list");
    return descending(c.eps_list);
  }
  if (!c.eps_list.empty()) invalid("eps_list needs domain.hole");
  if (c.h.relative) invalid("h relative to eps needs a hole; give an absolute h");
  return {0.0};
}

double spacing(const ExperimentConfig& c, double eps) {
  const double h = c.h.at(eps);
  if (!(h > 0.0)) invalid("h must be positive");
  return h;
}

void finish_timing(const ExperimentConfig& c, SweepRecord& rec, const Stopwatch& sw) {
  rec.runtime_s = c.report.runtime ? sw.seconds() : 0.0;
}

Field solve_for(const GridPtr& grid, const Nonlinearity& nl, json* details) {
  if (nl.kind() == NonlinearityKind::LinearEigen) {
    EigenPair ep = solve_eigen(grid);
    if (details) {
      (*details)["lambda"] = ep.lambda;
      (*details)["outer_iterations"] = ep.outer_iterations;
    }
    return std::move(ep.phi);
  }
  return solve_state(grid, nl);
}

void fill_crit(SweepRecord& rec, const CritSet& cs, const Field& u) {
  const AuditRecord audit = poincare_hopf_audit(cs, u);
  rec.crit_count = static_cast<int>(cs.points.size());
  rec.index_sum = audit.index_sum;
  rec.audit = to_string(audit.status);
  rec.points = cs.to_json();
  rec.rings = cs.report_json()["rings"];
  rec.details["audit"] = audit.to_json();
  rec.details["crit_diagnostics"] = cs.report_json()["diagnostics"];
}

SweepReport run_solve(const ExperimentConfig& c, const std::string& out_dir, bool with_crit) {
  SweepReport rep = new_report(c, with_crit ? Command::Critpoints : Command::Solve);
  const Nonlinearity nl = c.nonlinearity.make();
  const std::vector<double> eps_cases = cases(c);
  for (std::size_t k = 0; k < eps_cases.size(); ++k) {
    const double eps = eps_cases[k];
    SweepRecord rec;
    rec.eps = eps;
    rec.h = spacing(c, eps);
    rec.details = json::object();
    Stopwatch sw;
    guarded(rec, [&] {
      const GridPtr grid = make_grid(c.domain.region(eps), rec.h);
      const Field u = solve_for(grid, nl, &rec.details);
      rec.details["unknowns"] = grid->unknown_count();
      rec.details["residual"] = u.meta.residual;
      rec.details["newton_steps"] = u.meta.newton_steps;
      rec.details["linear_iterations"] = u.meta.linear_iterations;
      rec.details["used_bicgstab"] = u.meta.used_bicgstab;
      rec.details["min"] = u.min_value();
      rec.details["max"] = u.max_value();
      if (with_crit) {
        fill_crit(rec, find_critical_points(u, c.report.margin), u);
      } else if (c.report.fields) {
        const std::string name = "field_" + std::to_string(k) + ".bin";
        write_field(u, (std::filesystem::path(out_dir) / name).string());
        rec.details["field_file"] = name;
      }
    });
    finish_timing(c, rec, sw);
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

// H(P, P) for a disc of radius R centred at the origin, from the unit disc
// by scaling.
std::optional<double> regular_part_at(const DomainConfig& d, Vec2 P) {
  if (d.kind != "disc") return std::nullopt;
  const double R = d.radius;
  return disc_regular_part(P / R, P / R) + std::log(R) / (2.0 * kPi);
}

Prediction predict(const ExperimentConfig& c, const LocalData& ld, double eps) {
  const std::string& kind = c.report.predictor;
  if (kind == "radial") return predict_radial(ld.N, eps, ld.u0P, ld.fu0P);
  if (kind == "degenerate" || (kind == "auto" && ld.is_critical())) {
    return predict_degenerate(ld, eps);
  }
  return predict_nondegenerate(ld, eps);
}

// Detected extra point closest to a predicted one; saddles first for the
// nondegenerate law.
std::optional<std::size_t> closest(const CritSet& cs, const std::vector<std::size_t>& extras,
                                   Vec2 target, bool saddles_only) {
  std::optional<std::size_t> best;
  for (std::size_t k : extras) {
    if (saddles_only && cs.points[k].cls != CritClass::Saddle) continue;
    if (!best || norm(cs.points[k].x - target) < norm(cs.points[*best].x - target)) best = k;
  }
  if (!best && saddles_only) return closest(cs, extras, target, false);
  return best;
}

double expansion_error(const Field& u, const Field& u0, Vec2 P, double eps, double HPP) {
  double sup = 0.0;
  for (int k = 0; k < kExpansionProbes; ++k) {
    const double t = 2.0 * kPi * k / kExpansionProbes;
    const Vec2 x = P + 3.0 * eps * Vec2{std::cos(t), std::sin(t)};
    if (!u.sampleable(x) || !u0.sampleable(x)) continue;
    sup = std::max(sup, std::abs(u.sample_value(x) - expansion_field(x, u0, P, eps, 2, HPP)));
  }
  return sup;
}

SweepReport run_sweep(const ExperimentConfig& c) {
  SweepReport rep = new_report(c, Command::Sweep);
  if (!c.domain.hole_center) invalid("sweep needs domain.hole");
  if (c.eps_list.empty()) invalid("sweep needs eps_list");
  if (c.report.predictor == "radial") invalid("the radial predictor applies to radial-sweep");
  const Vec2 P = *c.domain.hole_center;
  const Nonlinearity nl = c.nonlinearity.make();
  const std::vector<double> eps_sorted = descending(c.eps_list);
  double h_ref = INFINITY;
  for (double e : eps_sorted) h_ref = std::min(h_ref, spacing(c, e));

  // Unperturbed problem on the finest spacing of the sweep.
  const GridPtr grid0 = make_grid(c.domain.outer(), h_ref);
  const Field u0 = solve_for(grid0, nl, nullptr);
  LocalData ld = local_data(u0, P);
  ld.fu0P = nl.kind() == NonlinearityKind::LinearEigen ? 0.0 : nl.f(ld.u0P);
  const std::optional<double> HPP = regular_part_at(c.domain, P);
  ld.HPP = HPP.value_or(0.0);
  const CritSet cs0 = find_critical_points(u0, c.report.margin);
  rep.reference = {{"h", h_ref},
                   {"local_data", ld.to_json()},
                   {"HPP_available", HPP.has_value()},
                   {"points", cs0.to_json()}};

  std::optional<Law> law;
  double exponent = 0.0;
  VecN c_predicted;
  std::vector<RateRecord> rates;
  for (double eps : eps_sorted) {
    SweepRecord rec;
    rec.eps = eps;
    rec.h = spacing(c, eps);
    rec.details = json::object();
    rec.matches = json::array();
    Stopwatch sw;
    guarded(rec, [&] {
      const Prediction pred = predict(c, ld, eps);
      rec.prediction = pred.to_json();
      const GridPtr grid = make_grid(c.domain.region(eps), rec.h);
      const Field u = solve_for(grid, nl, &rec.details);
      const CritSet cs = find_critical_points(u, c.report.margin);
      fill_crit(rec, cs, u);
      if (HPP && nl.kind() != NonlinearityKind::LinearEigen) {
        rec.expansion_error = expansion_error(u, u0, P, eps, *HPP);
      }

      const Pairing pairing = persistence_match(cs, cs0, c.report.pairing_radius);
      json paired = json::array();
      for (const auto& p : pairing.pairs) {
        paired.push_back({{"reference", p.reference}, {"perturbed", p.perturbed}, {"distance", p.distance}});
      }
      rec.details["pairing"] = {{"pairs", paired}, {"lost", pairing.lost}, {"extras", pairing.extras}};

      const bool saddles_only = pred.kind == PredictionKind::NondegSaddle;
      for (std::size_t m = 0; m < pred.points.size(); ++m) {
        const Vec2 target = to_vec2(pred.points[m]);
        json match{{"predicted", {target.x, target.y}}};
        const auto hit = closest(cs, pairing.extras, target, saddles_only);
        if (!hit) {
          match["detected"] = nullptr;
          rec.matches.push_back(match);
          continue;
        }
        const CriticalPoint& cp = cs.points[*hit];
        const double err = norm(cp.x - target);
        const double rel = err / norm(target - P);
        const double align = angle_deg(cp.x - P, target - P);
        match["detected"] = {cp.x.x, cp.x.y};
        match["class"] = to_string(cp.cls);
        match["value"] = cp.value;
        match["err_abs"] = err;
        match["err_rel"] = rel;
        match["align_deg"] = align;
        rec.matches.push_back(match);
        if (m == 0) {
          rec.saddle = cp.x;
          rec.predicted = target;
          rec.saddle_value = cp.value;
          rec.err_abs = err;
          rec.err_rel = rel;
          rec.align_deg = align;
        }
      }
      if (!pred.points.empty()) {
        law = pred.law;
        exponent = pred.exponent;
        const double g = law_scale(pred.law, eps, pred.exponent);
        const Vec2 cp = (to_vec2(pred.points[0]) - P) / g;
        c_predicted = {cp.x, cp.y};
      }
      if (!rec.saddle) throw Error(ErrorCode::NoConvergence, "no detected point matches the prediction");
      rates.push_back({eps, {rec.saddle->x - P.x, rec.saddle->y - P.y}});
    });
    finish_timing(c, rec, sw);
    rep.records.push_back(std::move(rec));
  }

  if (law) {
    try {
      const RateFit fit = fit_rate(rates, *law, exponent);
      rep.fit = FitRecord{to_string(*law), exponent, fit.c, fit.residual, c_predicted};
    } catch (const Error& e) {
      rep.fit_error = e.what();
    }
  }
  return rep;
}

SweepReport run_radial(const ExperimentConfig& c) {
  SweepReport rep = new_report(c, Command::RadialSweep);
  if (c.eps_list.empty()) invalid("radial-sweep needs eps_list");
  const Nonlinearity nl = c.nonlinearity.make();
  if (nl.kind() == NonlinearityKind::LinearEigen) {
    invalid("radial-sweep needs a torsion or custom nonlinearity");
  }
  const std::vector<double> eps_sorted = descending(c.eps_list);
  const double u00 = solve_radial_ball_centre(c.radial.N, nl);
  rep.reference = {{"N", c.radial.N}, {"u0_at_0", u00}, {"f_at_u0_0", nl.f(u00)}};
  for (double eps : eps_sorted) {
    SweepRecord rec;
    rec.eps = eps;
    rec.details = json::object();
    Stopwatch sw;
    guarded(rec, [&] {
      const RadialSolution sol = solve_radial({c.radial.N, eps, nl, c.radial.n});
      rec.h = sol.r[1] - sol.r[0];
      rec.details["r_eps"] = sol.r_eps;
      rec.details["newton_iters"] = sol.newton_iterations;
      rec.details["sign_changes"] = sol.sign_changes;
      rec.details["residual"] = sol.residual;
      const Prediction p = predict_radial(c.radial.N, eps, u00, nl.f(u00));
      rec.prediction = p.to_json();
      rec.details["ratio_to_law"] = sol.r_eps / law_scale(p.law, eps, p.exponent);
      rec.details["pred_printed"] = p.radii.front();
      rec.details["pred_cross"] = p.radii.back();
    });
    finish_timing(c, rec, sw);
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

QuadraticPolynomial random_polynomial(std::mt19937_64& rng, int N) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  QuadraticPolynomial q;
  const auto n = static_cast<std::size_t>(N);
  q.c = coef(rng);
  q.b.resize(n);
  for (double& v : q.b) v = coef(rng);
  q.a.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) q.a[i * n + j] = q.a[j * n + i] = coef(rng);
  }
  return q;
}

SweepReport run_green(const ExperimentConfig& c) {
  SweepReport rep = new_report(c, Command::GreenVerify);
  if (c.domain.kind != "disc" || c.domain.radius != 1.0) {
    invalid("green-verify runs on the unit disc");
  }
  if (!c.domain.hole_center) invalid("green-verify needs domain.hole");
  if (c.eps_list.empty()) invalid("green-verify needs eps_list");
  const Vec2 P = *c.domain.hole_center;

  // Poisson-kernel identities on random quadratics drawn from the seed.
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  json identities = json::array();
  for (int N : {2, 3}) {
    for (int k = 0; k < 3; ++k) {
      const QuadraticPolynomial q = random_polynomial(rng, N);
      VecN s(static_cast<std::size_t>(N));
      for (double& v : s) v = 0.5 * unit(rng) / std::sqrt(static_cast<double>(N));
      identities.push_back({{"N", N}, {"residual", poisson_identity_check(q, s, N)}});
    }
  }
  rep.reference = {{"poisson_identity", identities}, {"HPP", disc_regular_part(P, P)}};

  for (double eps : descending(c.eps_list)) {
    SweepRecord rec;
    rec.eps = eps;
    rec.h = spacing(c, eps);
    rec.details = json::object();
    Stopwatch sw;
    guarded(rec, [&] {
      const PsiReport psi = psi_eps_verify(P, eps, rec.h);
      rec.details["max_deviation"] = psi.max_deviation;
      rec.details["probe_radius"] = psi.probe_radius;
      rec.details["probes"] = psi.probes;
    });
    finish_timing(c, rec, sw);
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

SweepReport run_predict(const ExperimentConfig& c) {
  SweepReport rep = new_report(c, Command::Predict);
  if (!c.local_data) invalid("predict needs local_data");
  if (c.eps_list.empty()) invalid("predict needs eps_list");
  rep.reference = {{"local_data", c.local_data->to_json()}};
  for (double eps : descending(c.eps_list)) {
    SweepRecord rec;
    rec.eps = eps;
    Stopwatch sw;
    guarded(rec, [&] { rec.prediction = predict(c, *c.local_data, eps).to_json(); });
    finish_timing(c, rec, sw);
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

void summarize(const SweepReport& rep, std::ostream& out) {
  for (const auto& r : rep.records) {
    out << rep.command << " eps=" << format_double(r.eps);
    if (r.error) {
      out << " ERROR " << *r.error << '\n';
      continue;
    }
    if (r.crit_count) out << " crit=" << *r.crit_count << " index_sum=" << *r.index_sum << " audit=" << *r.audit;
    if (r.err_rel) out << " err_rel=" << format_double(*r.err_rel);
    if (r.details.is_object()) {
      for (const char* key : {"r_eps", "max_deviation", "lambda", "residual"}) {
        if (r.details.contains(key)) out << ' ' << key << '=' << format_double(r.details[key].get<double>());
      }
    }
    out << '\n';
  }
  if (rep.fit) {
    out << "fit " << rep.fit->law << " c=(" << format_double(rep.fit->c.at(0)) << ", "
        << format_double(rep.fit->c.at(1)) << ") residual=" << format_double(rep.fit->residual)
        << '\n';
  }
}

}  // namespace

std::string version() { return HOLEPOINT_VERSION; }
std::string build_hash() { return HOLEPOINT_BUILD_HASH; }

SweepReport execute(const ExperimentConfig& config, Command command, const std::string& out_dir) {
  if (config.command && *config.command != command) {
    invalid("config command '" + to_string(*config.command) + "' differs from '" +
            to_string(command) + "'");
  }
  switch (command) {
    case Command::Solve:
      return run_solve(config, out_dir, false);
    case Command::Critpoints:
      return run_solve(config, out_dir, true);
    case Command::Sweep:
      return run_sweep(config);
    case Command::RadialSweep:
      return run_radial(config);
    case Command::GreenVerify:
      return run_green(config);
    case Command::Predict:
      return run_predict(config);
  }
  invalid("unknown command");
}

int run(const ExperimentConfig& config, Command command, const RunOptions& options,
        std::ostream& out, std::ostream& err) {
  SweepReport rep;
  try {
    std::filesystem::create_directories(options.out_dir);
    rep = execute(config, command, options.out_dir);
    const std::filesystem::path dir(options.out_dir);
    emit_json(rep, (dir / config.output.json).string());
    if (command == Command::RadialSweep) {
      emit_radial_csv(rep, (dir / config.output.csv).string());
    } else if (command == Command::Sweep || command == Command::Critpoints) {
      emit_csv(rep, (dir / config.output.csv).string());
    }
  } catch (const Error& e) {
    err << "holepoint: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "holepoint: " << e.what() << '\n';
    return 1;
  }
  if (!options.quiet) summarize(rep, out);
  return rep.has_failures() ? 2 : 0;
}

}  // namespace holepoint::cli
