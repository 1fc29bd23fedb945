#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mosm/types.hpp"

namespace mosm {

/// How a direction set covers S². Downstream code uses the tag to decide whether
/// a sum over the set is a sphere quadrature or an aperture-limited sum.
enum class Topology { FullSphere, GreatCircle, Custom };

std::string_view to_string(Topology topology);
Topology topology_from_string(std::string_view text);

/// Immutable set of unit vectors with positive quadrature weights (steradians).
///
/// Construction validates |point| = 1 within 1e-12 and weights > 0; a
/// full-sphere set must additionally carry total weight 4π within 1e-10.
class UnitDirectionSet {
 public:
  UnitDirectionSet(std::vector<Vec3> points, std::vector<double> weights, Topology topology);

  std::size_t size() const noexcept { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Vec3>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  Topology topology() const noexcept { return topology_; }
  double total_weight() const;

  /// Σ w_i f(d_i).
  template <typename Fn>
  auto integrate(Fn&& fn) const {
    using R = decltype(fn(points_[0]));
    R sum = R{} * 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) sum += weights_[i] * fn(points_[i]);
    return sum;
  }

  friend bool operator==(const UnitDirectionSet&, const UnitDirectionSet&) = default;

 private:
  std::vector<Vec3> points_;
  std::vector<double> weights_;
  Topology topology_;
};

/// Fibonacci spiral with n points and equal weights 4π/n. Bit-reproducible.
UnitDirectionSet make_quasi_uniform_sphere(int n);

/// n equally spaced unit vectors on the great circle orthogonal to `axis`,
/// with arc-length weights 2π/n. For axis = e_z the first point is e_x and
/// points advance counter-clockwise.
UnitDirectionSet make_great_circle(int n, const Vec3& axis);

/// Right-handed orthonormal frame {e1, e2, d}.
struct TangentFrame {
  Vec3 e1;
  Vec3 e2;
};

/// Deterministic tangent frame for a unit vector d. The coordinate axis with
/// the smallest |d_i| (first one on ties) is crossed with d to give e1, then
/// e2 = d × e1.
TangentFrame tangential_basis(const Vec3& d);

/// v − (v·d) d.
CVec3 tangential_projection(const Vec3& d, const CVec3& v);

/// Complex 3-vector samples on a direction set, tangential at every point:
/// |d·v(d)| ≤ 1e-10 |v(d)|.
class TangentialField {
 public:
  TangentialField(std::shared_ptr<const UnitDirectionSet> base, std::vector<CVec3> values);

  const UnitDirectionSet& base() const noexcept { return *base_; }
  std::shared_ptr<const UnitDirectionSet> base_ptr() const noexcept { return base_; }
  const std::vector<CVec3>& values() const noexcept { return values_; }
  const CVec3& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Quadrature L² norm squared, Σ w_i |v_i|².
  double norm_squared() const;

 private:
  std::shared_ptr<const UnitDirectionSet> base_;
  std::vector<CVec3> values_;
};

/// ASCII table: optional "# topology <tag>" line, then one "x y z w" line per
/// point, all values printed with 17 significant digits.
void write_directions(std::ostream& out, const UnitDirectionSet& set);
UnitDirectionSet read_directions(std::istream& in);

}  // namespace mosm
