#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "mosm/sphere_geometry.hpp"
#include "mosm/types.hpp"

namespace mosm {

/// Which Cartesian components of the far field were measured.
struct ComponentMask {
  std::array<bool, 3> on{true, true, true};

  static ComponentMask all() { return {}; }
  static ComponentMask only(int component) {
    ComponentMask m{{false, false, false}};
    m.on.at(static_cast<std::size_t>(component)) = true;
    return m;
  }
  bool is_all() const { return on[0] && on[1] && on[2]; }
  CVec3 apply(const CVec3& v) const {
    return CVec3(on[0] ? v[0] : cdouble(0), on[1] ? v[1] : cdouble(0), on[2] ? v[2] : cdouble(0));
  }
  friend bool operator==(const ComponentMask&, const ComponentMask&) = default;
};

/// Far-field matrices u∞(x̂_i, d_j) ∈ C^{3×3} on observation × incidence sets.
/// The polarization q enters linearly: u∞(x̂, d, q) = entry(i, j) q.
struct FarFieldData {
  double k = 1.0;
  std::shared_ptr<const UnitDirectionSet> observation;
  std::shared_ptr<const UnitDirectionSet> incidence;
  ComponentMask mask;
  /// entries[j * n_obs + i] = u∞(x̂_i, d_j).
  std::vector<CMat3> entries;
  /// Optional per-incidence polarization actually used by the source (measured
  /// data); empty for synthetic data.
  std::vector<Vec3> polarization_tags;

  FarFieldData() = default;
  FarFieldData(double k, std::shared_ptr<const UnitDirectionSet> observation,
               std::shared_ptr<const UnitDirectionSet> incidence, ComponentMask mask = {});

  std::size_t n_obs() const { return observation->size(); }
  std::size_t n_inc() const { return incidence->size(); }
  CMat3& entry(std::size_t i_obs, std::size_t j_inc) { return entries[j_inc * n_obs() + i_obs]; }
  const CMat3& entry(std::size_t i_obs, std::size_t j_inc) const { return entries[j_inc * n_obs() + i_obs]; }

  /// Throws std::invalid_argument on inconsistent sizes.
  void validate() const;

  /// l² norm over every stored complex entry.
  double norm() const;

  /// max over entries of ‖x̂_iᵀ U_ij‖ / ‖U_ij‖ (Frobenius); 0 for exact data.
  double max_radial_fraction() const;
};

/// Bit-exact ASCII format (17 significant digits):
///   k <value> / nobs <n> / ninc <m> / mask <bits> / tags <0|1>
///   observations: direction table, incidences: direction table
///   [polarization tags: m lines "x y z"]
///   m·n lines of 18 reals (row-major 3×3, re/im interleaved), incidence-major.
void write_far_field_data(std::ostream& out, const FarFieldData& data);
FarFieldData read_far_field_data(std::istream& in);

/// u_δ = u + δ N ‖u‖ / ‖N‖ with N_i = a + ib, a, b uniform on (−1, 1) from a
/// 64-bit Mersenne twister seeded with `seed`.
FarFieldData add_noise(const FarFieldData& data, double delta, std::uint64_t seed);

}  // namespace mosm
