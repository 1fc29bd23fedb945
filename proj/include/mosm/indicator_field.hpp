#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mosm/types.hpp"

namespace mosm {

/// Tensor-product grid of sampling points y including both box faces:
/// y_{ijl} = lower + (upper − lower) ⊙ (i, j, l) / (n − 1). Index i + n0 (j + n1 l).
struct SamplingGrid {
  Vec3 lower = Vec3::Constant(-1.0);
  Vec3 upper = Vec3::Constant(1.0);
  std::array<int, 3> n{2, 2, 2};

  SamplingGrid() = default;
  /// Throws std::invalid_argument for fewer than 2 points per axis or a degenerate box.
  SamplingGrid(const Vec3& lower, const Vec3& upper, std::array<int, 3> n);
  static SamplingGrid cube(double half_width, int n) {
    return SamplingGrid(Vec3::Constant(-half_width), Vec3::Constant(half_width), {n, n, n});
  }

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(n[2]);
  }
  double spacing(int axis) const { return (upper[axis] - lower[axis]) / (n[axis] - 1); }
  double coordinate(int axis, int i) const { return lower[axis] + spacing(axis) * i; }
  std::size_t index(int i, int j, int l) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * l);
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3 point(std::size_t idx) const;
};

/// Nonnegative samples on a SamplingGrid. After normalize() the maximum is
/// exactly 1 unless the field is identically zero, in which case it is left
/// untouched and all_zero is set.
struct IndicatorField {
  SamplingGrid grid;
  std::vector<double> values;
  double raw_max = 0.0;
  bool normalized = false;
  bool all_zero = false;

  void normalize();
  /// Smallest (i, j, l) in lexicographic order among the maximal values.
  std::size_t argmax() const;
};

/// VTK legacy ASCII, DATASET STRUCTURED_POINTS, one SCALARS array, x fastest.
void write_vtk(std::ostream& out, const IndicatorField& field, const char* name = "indicator");
/// "x,y,z,value" header, one row per sampling point in index order.
void write_csv(std::ostream& out, const IndicatorField& field);

}  // namespace mosm
