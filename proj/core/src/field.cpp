#include "holepoint/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "holepoint/error.hpp"

namespace holepoint {

Field::Field(GridPtr grid, std::vector<double> values, BoundaryData boundary)
    : grid_(std::move(grid)), values_(std::move(values)), boundary_(boundary) {
  if (!grid_) throw Error(ErrorCode::InvalidArgument, "field needs a grid");
  if (values_.size() != grid_->unknown_count()) {
    throw Error(ErrorCode::InvalidArgument, "field value count does not match the grid");
  }
}

Field Field::from_function(GridPtr grid, const std::function<double(Vec2)>& fn) {
  std::vector<double> values(grid->unknown_count());
  for (std::size_t u = 0; u < values.size(); ++u) {
    const auto [i, j] = grid->unknown_nodes()[u];
    values[u] = fn(grid->position(i, j));
  }
  return Field(std::move(grid), std::move(values));
}

double Field::node_value(int i, int j) const {
  const int u = grid_->unknown(i, j);
  return u < 0 ? std::numeric_limits<double>::quiet_NaN() : values_[static_cast<std::size_t>(u)];
}

double Field::max_value() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

std::array<int, 2> Field::nearest_node(Vec2 x) const {
  const double h = grid_->h();
  return {static_cast<int>(std::lround((x.x - grid_->origin().x) / h)),
          static_cast<int>(std::lround((x.y - grid_->origin().y) / h))};
}

bool Field::sampleable(Vec2 x) const {
  if (!(grid_->region().inner_distance(x) >= 2.0 * grid_->h())) return false;
  const auto [i0, j0] = nearest_node(x);
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (grid_->unknown(i0 + di, j0 + dj) < 0) return false;
    }
  }
  return true;
}

Jet Field::sample(Vec2 x) const {
  if (!sampleable(x)) {
    throw Error(ErrorCode::TooCloseToBoundary, "sample point is within 2h of a boundary");
  }
  const auto [i0, j0] = nearest_node(x);
  return sample_patch(x, i0, j0);
}

Jet Field::sample_patch(Vec2 x, int i0, int j0) const {
  const double h = grid_->h();
  const Vec2 c = grid_->position(i0, j0);
  const double s = (x.x - c.x) / h;
  const double t = (x.y - c.y) / h;
  // Quadratic Lagrange basis on nodes -1, 0, 1 and its derivatives.
  const std::array<double, 3> ls{0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)};
  const std::array<double, 3> ds{s - 0.5, -2.0 * s, s + 0.5};
  const std::array<double, 3> dds{1.0, -2.0, 1.0};
  const std::array<double, 3> lt{0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)};
  const std::array<double, 3> dt{t - 0.5, -2.0 * t, t + 0.5};
  const std::array<double, 3> ddt{1.0, -2.0, 1.0};

  Jet jet;
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < 3; ++a) {
      const int u = grid_->unknown(i0 + a - 1, j0 + b - 1);
      if (u < 0) throw Error(ErrorCode::TooCloseToBoundary, "patch touches an exterior node");
      const double v = values_[static_cast<std::size_t>(u)];
      jet.value += v * ls[a] * lt[b];
      jet.gradient.x += v * ds[a] * lt[b];
      jet.gradient.y += v * ls[a] * dt[b];
      jet.hessian.xx += v * dds[a] * lt[b];
      jet.hessian.xy += v * ds[a] * dt[b];
      jet.hessian.yy += v * ls[a] * ddt[b];
    }
  }
  jet.gradient = jet.gradient / h;
  jet.hessian.xx /= h * h;
  jet.hessian.xy /= h * h;
  jet.hessian.yy /= h * h;
  return jet;
}

FieldFile to_field_file(const Field& field) {
  const Grid2D& g = field.grid();
  FieldFile f;
  f.nx = g.nx();
  f.ny = g.ny();
  f.h = g.h();
  f.origin = g.origin();
  f.domain_hash = g.domain_hash();
  f.values.resize(g.node_count());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) f.values[g.index(i, j)] = field.node_value(i, j);
  }
  return f;
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(const Field& field, const std::string& path) {
  const FieldFile f = to_field_file(field);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  nlohmann::ordered_json header;
  header["nx"] = f.nx;
  header["ny"] = f.ny;
  header["h"] = f.h;
  header["origin"] = {f.origin.x, f.origin.y};
  header["domain_hash"] = hex64(f.domain_hash);
  os << header.dump() << '\n';
  for (double v : f.values) put_le(os, v);
  if (!os) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

FieldFile read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  std::getline(is, line);
  FieldFile f;
  try {
    const auto header = nlohmann::json::parse(line);
    f.nx = header.at("nx").get<int>();
    f.ny = header.at("ny").get<int>();
    f.h = header.at("h").get<double>();
    f.origin = {header.at("origin").at(0).get<double>(), header.at("origin").at(1).get<double>()};
    f.domain_hash = std::stoull(header.at("domain_hash").get<std::string>(), nullptr, 16);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("bad field header: ") + e.what());
  }
  const std::size_t count = static_cast<std::size_t>(f.nx) * f.ny;
  std::vector<unsigned char> raw(count * 8);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) {
    throw Error(ErrorCode::IoError, "field payload truncated in " + path);
  }
  f.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) f.values[k] = get_le(raw.data() + 8 * k);
  return f;
}

}  // namespace holepoint
