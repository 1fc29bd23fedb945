#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mosm/em_core.hpp"
#include "mosm/far_field_data.hpp"
#include "mosm/indicator_field.hpp"

namespace mosm {

/// Evaluates I(y) = Σ_i ω_i |mask ⊙ Σ_j w_j U_ij h(d_j) e^{−ik d_j·y}|².
///
/// ω_i = w_i for full-sphere and custom observation sets; for a great-circle
/// aperture ω_i = 1/n_obs (mean over receivers).
class MosmEvaluator {
 public:
  /// Throws std::invalid_argument when data.k and ctx.k differ by more than 1e-12 relative.
  MosmEvaluator(const FarFieldData& data, const WaveContext& ctx);

  double value(const Vec3& y) const;
  const std::vector<double>& outer_weights() const noexcept { return omega_; }

 private:
  const FarFieldData* data_;
  WaveContext ctx_;
  std::vector<double> omega_;
  // v[j * n_obs + i] = w_j mask ⊙ (U_ij h(d_j)).
  std::vector<CVec3> v_;
};

double mosm_value(const FarFieldData& data, const Vec3& y, const WaveContext& ctx);

/// mosm_value on every grid point, then normalized (or flagged all-zero).
/// Output is bitwise independent of the worker count.
IndicatorField scan(const FarFieldData& data, const SamplingGrid& grid, const WaveContext& ctx,
                    unsigned workers = 0);

/// Unnormalized scan (raw I values).
IndicatorField scan_raw(const FarFieldData& data, const SamplingGrid& grid, const WaveContext& ctx,
                        unsigned workers = 0);

struct Isosurface {
  std::vector<std::size_t> indices;  // ascending grid indices with value ≥ isovalue
  bool empty_warning = false;
};

Isosurface threshold_isosurface(const IndicatorField& field, double isovalue);
/// "x,y,z,value" for the selected points.
void write_point_cloud(std::ostream& out, const IndicatorField& field, const Isosurface& set);

/// Axis-aligned plane through the field at the grid layer nearest to `offset`.
struct Slice2D {
  int axis = 1;
  double plane = 0.0;          // coordinate of the extracted layer
  std::vector<double> u;       // coordinates along the first in-plane axis
  std::vector<double> v;       // coordinates along the second in-plane axis
  std::vector<double> values;  // row-major: values[r * u.size() + c] at (u[c], v[r])
  double at(std::size_t r, std::size_t c) const { return values[r * u.size() + c]; }
};

/// Throws std::invalid_argument for a bad axis or an offset outside the box.
Slice2D slice(const IndicatorField& field, int axis, double offset);
/// First row: "v\u,<u0>,<u1>,..."; then one row per v with its coordinate first.
void write_slice_csv(std::ostream& out, const Slice2D& s);

/// ‖F‖ as a map from the weighted L² space of tangential incident densities
/// to the (masked, 3-component) observation space with the MOSM outer weights.
double operator_norm(const FarFieldData& data, const WaveContext& ctx);
/// Σ_j w_j |h(d_j)|².
double probe_norm_squared(const FarFieldData& data, const WaveContext& ctx);

struct StabilityRow {
  double delta = 0.0;
  std::uint64_t seed = 0;
  double max_gap = 0.0;             // max_y |I(y) − I_δ(y)|
  double bound = 0.0;               // (δ² + 2δ)‖F‖²‖h‖²
  double margin = 0.0;              // bound − max_gap
  double perturbation_ratio = 0.0;  // ‖F − F_δ‖ / ‖F‖
  bool holds = false;
};

struct StabilityReport {
  double operator_norm = 0.0;
  double probe_norm_squared = 0.0;
  std::vector<StabilityRow> rows;
  bool all_hold() const;
};

StabilityReport stability_gap(const FarFieldData& data, const std::vector<double>& deltas,
                              const std::vector<std::uint64_t>& seeds, const SamplingGrid& grid,
                              const WaveContext& ctx, unsigned workers = 0);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> distances;
  std::vector<double> values;
  /// Slope above −0.5: the indicator does not decay, which no radiating data produce.
  bool non_physical = false;
};

/// Least-squares slope of log I against log dist along the given points.
/// Throws std::invalid_argument for fewer than 8 points or non-positive distances.
DecayFit decay_profile(const FarFieldData& data, const std::vector<Vec3>& ray,
                       const std::vector<double>& distances, const WaveContext& ctx);

/// |A ∩ B| / |A ∪ B| of sorted index sets; 1 for two empty sets.
double jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/// 6-connected components of a set of sampling-grid indices.
int count_components(const SamplingGrid& grid, const std::vector<std::size_t>& indices);
/// 4-connected components of {value ≥ isovalue} in a slice.
int count_components(const Slice2D& s, double isovalue);

}  // namespace mosm
