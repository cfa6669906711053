#include "holepoint/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "holepoint/error.hpp"

namespace holepoint {

namespace {

constexpr double kPi = std::numbers::pi;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
}

VecN axpy(const VecN& base, double t, const VecN& dir) {
  VecN out = base;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += t * dir[i];
  return out;
}

double distance(const VecN& a, const VecN& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen symmetric_eigen(const VecN& a_in, int N) {
  const auto n = static_cast<std::size_t>(N);
  if (N < 1 || a_in.size() != n * n) {
    throw Error(ErrorCode::InvalidArgument, "matrix must be N x N");
  }
  VecN a = a_in;
  VecN v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  auto at = [n](VecN& m, std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  double scale = 0.0;
  for (double x : a) scale += x * x;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += at(a, i, j) * at(a, i, j);
    }
    if (off <= 1e-30 * scale || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(a, k, p), akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(a, p, k), aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = at(v, k, p), vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return at(a, x, x) < at(a, y, y); });
  SymmetricEigen out;
  for (std::size_t k : order) {
    out.values.push_back(at(a, k, k));
    VecN vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = at(v, i, k);
    // Sign convention: largest component positive.
    const auto big = std::max_element(vec.begin(), vec.end(),
                                      [](double x, double y) { return std::abs(x) < std::abs(y); });
    if (*big < 0.0) {
      for (double& x : vec) x = -x;
    }
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

void LocalData::validate() const {
  const auto n = static_cast<std::size_t>(N);
  if (N < 2 || N > 6) throw Error(ErrorCode::InvalidArgument, "N must be in 2..6");
  if (P.size() != n || grad0P.size() != n || hess0P.size() != n * n) {
    throw Error(ErrorCode::InvalidArgument, "local data sizes do not match N");
  }
  if (!(u0P > 0.0)) throw Error(ErrorCode::InvalidArgument, "u0(P) must be positive");
  double scale = 0.0;
  for (double x : hess0P) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(hess0P[i * n + j] - hess0P[j * n + i]) > 1e-12 * std::max(1.0, scale)) {
        throw Error(ErrorCode::InvalidArgument, "Hessian is not symmetric");
      }
    }
  }
}

bool LocalData::is_critical(double tol) const {
  double scale = u0P;
  for (double x : hess0P) scale = std::max(scale, std::abs(x));
  return norm(grad0P) <= tol * scale;
}

nlohmann::json LocalData::to_json() const {
  return {{"N", N},         {"P", P},       {"u0P", u0P}, {"grad0P", grad0P},
          {"hess0P", hess0P}, {"fu0P", fu0P}, {"HPP", HPP}};
}

LocalData LocalData::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {"N", "P", "u0P", "grad0P", "hess0P", "fu0P", "HPP"};
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "local data must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidArgument, "unknown local data key: " + key);
  }
  LocalData ld;
  try {
    ld.N = j.at("N").get<int>();
    ld.P = j.at("P").get<VecN>();
    ld.u0P = j.at("u0P").get<double>();
    ld.grad0P = j.at("grad0P").get<VecN>();
    const auto& h = j.at("hess0P");
    if (!h.empty() && h.front().is_array()) {
      for (const auto& row : h) {
        for (double x : row.get<VecN>()) ld.hess0P.push_back(x);
      }
    } else {
      ld.hess0P = h.get<VecN>();
    }
    ld.fu0P = j.value("fu0P", 0.0);
    ld.HPP = j.value("HPP", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("local data: ") + e.what());
  }
  ld.validate();
  return ld;
}

LocalData local_data(const Field& u0, Vec2 P) {
  const Jet jet = u0.sample(P);
  LocalData ld;
  ld.N = 2;
  ld.P = {P.x, P.y};
  ld.u0P = jet.value;
  ld.grad0P = {jet.gradient.x, jet.gradient.y};
  ld.hess0P = {jet.hessian.xx, jet.hessian.xy, jet.hessian.xy, jet.hessian.yy};
  return ld;
}

std::string to_string(PredictionKind kind) {
  switch (kind) {
    case PredictionKind::NondegSaddle: return "NONDEG_SADDLE";
    case PredictionKind::DegenFamily: return "DEGEN_FAMILY";
    case PredictionKind::Radial: return "RADIAL";
    case PredictionKind::Count: return "COUNT";
  }
  return "COUNT";
}

std::string to_string(Law law) {
  switch (law) {
    case Law::Log: return "LOG";
    case Law::SqrtLog: return "SQRT_LOG";
    case Law::Power: return "POWER";
  }
  return "LOG";
}

nlohmann::json Prediction::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)},
                      {"law", to_string(law)},
                      {"exponent", exponent},
                      {"eps", eps},
                      {"c", c},
                      {"points", points},
                      {"count_delta", count_delta},
                      {"count_is_lower_bound", count_is_lower_bound},
                      {"expected_index", expected_index},
                      {"expected_value", expected_value},
                      {"flags", flags}};
  if (kind == PredictionKind::Radial) j["radii"] = radii;
  return j;
}

double law_scale(Law law, double eps, double exponent) {
  check_eps(eps);
  switch (law) {
    case Law::Log: return 1.0 / std::abs(std::log(eps));
    case Law::SqrtLog: return 1.0 / std::sqrt(std::abs(std::log(eps)));
    case Law::Power: return std::pow(eps, exponent);
  }
  return 0.0;
}

double c_constant(int N, double u0P, const VecN& grad0P) {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "N must be at least 2");
  if (!(u0P > 0.0)) throw Error(ErrorCode::InvalidArgument, "u0(P) must be positive");
  const double g = norm(grad0P);
  if (g == 0.0) throw Error(ErrorCode::ZeroGradient, "grad u0(P) vanishes");
  if (N == 2) return -u0P / (g * g);
  return -std::pow((N - 2) * u0P / std::pow(g, N), 1.0 / (N - 1));
}

Prediction predict_nondegenerate(const LocalData& ld, double eps) {
  ld.validate();
  check_eps(eps);
  const double C = c_constant(ld.N, ld.u0P, ld.grad0P);
  Prediction p;
  p.kind = PredictionKind::NondegSaddle;
  p.eps = eps;
  if (ld.N == 2) {
    p.law = Law::Log;
  } else {
    p.law = Law::Power;
    p.exponent = (ld.N - 2.0) / (ld.N - 1.0);
  }
  p.c = ld.grad0P;
  for (double& x : p.c) x *= C;
  p.points.push_back(axpy(ld.P, law_scale(p.law, eps, p.exponent), p.c));
  p.count_delta = 1;
  p.expected_index = -1;
  p.expected_value = ld.u0P;
  return p;
}

Prediction predict_degenerate(const LocalData& ld, double eps) {
  ld.validate();
  check_eps(eps);
  const SymmetricEigen eig = symmetric_eigen(ld.hess0P, ld.N);
  double radius = 0.0, smallest = INFINITY;
  for (double l : eig.values) {
    radius = std::max(radius, std::abs(l));
    smallest = std::min(smallest, std::abs(l));
  }
  if (radius == 0.0 || smallest <= 1e-8 * radius) {
    throw Error(ErrorCode::DegenerateHessian, "Hessian of u0 at P is singular");
  }

  Prediction p;
  p.eps = eps;
  p.expected_value = ld.u0P;
  if (ld.N == 2) {
    p.law = Law::SqrtLog;
  } else {
    p.law = Law::Power;
    p.exponent = (ld.N - 2.0) / ld.N;
  }
  const double scale = law_scale(p.law, eps, p.exponent);
  int m = 0;
  bool multiple = false;
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    const double l = eig.values[i];
    if (l >= 0.0) continue;
    ++m;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
      if (k != i && std::abs(eig.values[k] - l) <= 1e-6 * radius) multiple = true;
    }
    const double coef = ld.N == 2 ? std::sqrt(-ld.u0P / l)
                                  : std::pow((2.0 - ld.N) * ld.u0P / l, 1.0 / ld.N);
    p.c.push_back(coef);
    p.points.push_back(axpy(ld.P, coef * scale, eig.vectors[i]));
    p.points.push_back(axpy(ld.P, -coef * scale, eig.vectors[i]));
  }
  if (m == 0) {
    // Nondegenerate minimum: no new point, and the minimum itself is lost.
    p.kind = PredictionKind::Count;
    p.count_delta = -1;
    return p;
  }
  p.kind = PredictionKind::DegenFamily;
  p.count_delta = 2 * m - 1;
  if (multiple) {
    p.flags.push_back("MULTIPLE_EIGENVALUE");
    p.count_is_lower_bound = true;
  }
  return p;
}

Prediction predict_radial(int N, double eps, double u0_at_0, double f_at_u0_0) {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "N must be at least 2");
  check_eps(eps);
  if (!(f_at_u0_0 > 0.0)) throw Error(ErrorCode::NonpositiveF, "f(u0(0)) must be positive");
  if (!(u0_at_0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "u0(0) must be positive");
  Prediction p;
  p.kind = PredictionKind::Radial;
  p.eps = eps;
  p.expected_value = u0_at_0;
  if (N == 2) {
    p.law = Law::SqrtLog;
    // PRINTED is sqrt(u0/(2f)); CROSS follows from the degenerate law with the
    // radial Hessian eigenvalue -f/2. The radii differ by a factor 2.
    p.c = {std::sqrt(u0_at_0 / (2.0 * f_at_u0_0)), std::sqrt(2.0 * u0_at_0 / f_at_u0_0)};
    p.flags = {"PRINTED", "CROSS"};
  } else {
    p.law = Law::Power;
    p.exponent = (N - 2.0) / N;
    p.c = {std::pow(N * (N - 2.0) * u0_at_0 / f_at_u0_0, 1.0 / N)};
  }
  const double scale = law_scale(p.law, eps, p.exponent);
  for (double c : p.c) p.radii.push_back(c * scale);
  return p;
}

LocationVerdict necessary_location_check(const VecN& x, const LocalData& ld, double eps,
                                         double rel_tol) {
  ld.validate();
  if (x.size() != ld.P.size()) throw Error(ErrorCode::InvalidArgument, "candidate dimension");
  std::vector<std::pair<std::string, VecN>> branches;
  if (!ld.is_critical()) {
    branches.emplace_back("NONDEG", predict_nondegenerate(ld, eps).points.front());
  } else {
    try {
      const Prediction p = predict_degenerate(ld, eps);
      for (std::size_t k = 0; k < p.points.size(); ++k) {
        const std::string sign = k % 2 == 0 ? "+" : "-";
        branches.emplace_back("DEGEN" + sign + std::to_string(k / 2 + 1), p.points[k]);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateHessian) throw;
    }
  }
  LocationVerdict best;
  best.residual = INFINITY;
  for (const auto& [name, xp] : branches) {
    const double r = distance(x, xp) / distance(xp, ld.P);
    if (r < best.residual) {
      best.residual = r;
      best.branch = name;
    }
  }
  best.match = best.residual <= rel_tol;
  return best;
}

double expansion_field(Vec2 x, const Field& u0, Vec2 P, double eps, int N, double HPP) {
  check_eps(eps);
  const double r = norm(x - P);
  if (r <= eps) throw Error(ErrorCode::TooCloseToHole, "expansion needs |x - P| > eps");
  const double u0x = u0.sample_value(x);
  const double u0P = u0.sample_value(P);
  if (N == 2) return u0x - u0P * (std::log(r) + 2.0 * kPi * HPP) / std::log(eps);
  return u0x - u0P * std::pow(eps / r, N - 2);
}

VecN b_matrix_spectrum(const VecN& xi, int N) {
  if (N < 2 || xi.size() != static_cast<std::size_t>(N)) {
    throw Error(ErrorCode::InvalidArgument, "xi must have N components");
  }
  const double xx = dot(xi, xi);
  if (xx == 0.0) throw Error(ErrorCode::ZeroVector, "xi must be nonzero");
  const auto n = static_cast<std::size_t>(N);
  VecN b(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b[i * n + j] = (i == j ? 1.0 : 0.0) - N * xi[i] * xi[j] / xx;
  }
  return symmetric_eigen(b, N).values;
}

RateFit fit_rate(const std::vector<RateRecord>& records, Law law, double exponent) {
  if (records.size() < 3) throw Error(ErrorCode::InsufficientData, "rate fit needs three records");
  const std::size_t dim = records.front().offset.size();
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (records[k].offset.size() != dim || dim == 0) {
      throw Error(ErrorCode::InvalidArgument, "offsets must share one dimension");
    }
    if (k > 0 && !(records[k].eps < records[k - 1].eps)) {
      throw Error(ErrorCode::InvalidArgument, "eps must be strictly decreasing");
    }
  }
  double gg = 0.0;
  VecN go(dim, 0.0);
  for (const RateRecord& r : records) {
    const double g = law_scale(law, r.eps, exponent);
    gg += g * g;
    for (std::size_t i = 0; i < dim; ++i) go[i] += g * r.offset[i];
  }
  RateFit fit;
  fit.c = go;
  for (double& c : fit.c) c /= gg;
  double rr = 0.0, oo = 0.0;
  for (const RateRecord& r : records) {
    const double g = law_scale(law, r.eps, exponent);
    for (std::size_t i = 0; i < dim; ++i) {
      rr += (r.offset[i] - fit.c[i] * g) * (r.offset[i] - fit.c[i] * g);
      oo += r.offset[i] * r.offset[i];
    }
  }
  fit.residual = oo > 0.0 ? std::sqrt(rr / oo) : std::sqrt(rr);
  return fit;
}

}  // namespace holepoint
