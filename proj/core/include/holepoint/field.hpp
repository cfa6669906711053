#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "holepoint/geometry.hpp"
#include "holepoint/vec.hpp"

namespace holepoint {

/// Dirichlet values on the outer boundary and on the hole boundary.
struct BoundaryData {
  double outer = 0.0;
  double hole = 0.0;
};

struct SolveMeta {
  std::string nonlinearity;
  double residual = 0.0;
  std::size_t linear_iterations = 0;
  int newton_steps = 0;
  std::vector<double> newton_trace;  // residual before each step, then final
  bool used_bicgstab = false;
};

/// Value, gradient and Hessian of the local biquadratic interpolant.
struct Jet {
  double value = 0.0;
  Vec2 gradient;
  SymMat2 hessian;
};

/// Discrete scalar field: one value per unknown of a shared, immutable grid.
class Field {
 public:
  Field(GridPtr grid, std::vector<double> values, BoundaryData boundary = {});

  static Field from_function(GridPtr grid, const std::function<double(Vec2)>& fn);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  const BoundaryData& boundary_data() const { return boundary_; }

  /// NaN at EXTERIOR nodes.
  double node_value(int i, int j) const;
  double max_value() const;
  double min_value() const;

  std::array<int, 2> nearest_node(Vec2 x) const;
  /// True when x is at least 2h inside both boundaries and the 3x3 patch
  /// around its nearest node holds no EXTERIOR node.
  bool sampleable(Vec2 x) const;

  double sample_value(Vec2 x) const { return sample(x).value; }
  Vec2 sample_gradient(Vec2 x) const { return sample(x).gradient; }
  SymMat2 sample_hessian(Vec2 x) const { return sample(x).hessian; }
  /// Biquadratic interpolation on the 3x3 patch around the nearest node.
  /// Throws TooCloseToBoundary unless sampleable(x).
  Jet sample(Vec2 x) const;
  /// Same interpolant but on the patch centred at node (i0, j0), for callers
  /// that need one smooth polynomial across patch switches.
  Jet sample_patch(Vec2 x, int i0, int j0) const;

  SolveMeta meta;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  BoundaryData boundary_;
};

/// Field file: one JSON header line followed by nx*ny little-endian doubles
/// in row-major order (x fastest), NaN at EXTERIOR nodes.
struct FieldFile {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Vec2 origin;
  std::uint64_t domain_hash = 0;
  std::vector<double> values;
};

FieldFile to_field_file(const Field& field);
void write_field(const Field& field, const std::string& path);
FieldFile read_field(const std::string& path);

}  // namespace holepoint
