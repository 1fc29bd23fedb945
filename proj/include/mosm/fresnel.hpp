#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mosm/far_field_data.hpp"

namespace mosm {

/// Column meaning and acquisition geometry of a measurement table. Columns are
/// 0-based; fields are separated by whitespace or commas.
struct FresnelLayout {
  int col_frequency = 0;  // GHz
  int col_source_theta = 1;
  int col_source_phi = 2;
  int col_receiver_phi = 3;
  int col_total_re = 4;
  int col_total_im = 5;
  int col_incident_re = 6;
  int col_incident_im = 7;
  bool degrees = false;
  std::string comment_prefix = "#";
  /// Source angles give the antenna position ŝ; the wave then travels along d = −ŝ.
  bool source_angles_are_positions = true;
  double receiver_radius_m = 0.0;  // required, > 0
  double unit_length_m = 0.04;     // meters per computational length unit
  int expected_sources = 81;       // 0 disables the count check
  int expected_receivers = 36;
  double min_frequency_ghz = 3.0;
  double max_frequency_ghz = 8.0;

  int max_column() const;
  /// Throws std::invalid_argument for inconsistent settings.
  void validate() const;
};

/// Reads a layout from JSON text; unspecified keys keep their defaults except
/// receiver_radius_m, which is required.
FresnelLayout layout_from_json(const std::string& json_text);
std::string layout_to_json(const FresnelLayout& layout);

/// One measurement; angles in radians.
struct MeasurementRecord {
  double frequency_ghz = 0.0;
  double source_theta = 0.0;
  double source_phi = 0.0;
  double receiver_phi = 0.0;
  cdouble total;
  cdouble incident;
};

struct FresnelDataset {
  FresnelLayout layout;
  std::vector<MeasurementRecord> records;  // file order
  std::vector<double> frequencies;         // ascending
  std::vector<std::array<double, 2>> sources;  // (θ, φ) in first-appearance order
  std::vector<double> receivers;               // φ in first-appearance order
  /// index[f][s * n_receivers + r] = position in records.
  std::vector<std::vector<std::size_t>> index;

  std::size_t frequency_index(double ghz) const;  // throws std::invalid_argument if absent
};

/// Groups and validates records. Malformed lines raise ParseError; missing or
/// duplicate (source, receiver) pairs, wrong counts, frequencies outside the
/// layout range, or a column map wider than the table raise StructuralError.
FresnelDataset parse_fresnel(std::istream& in, const FresnelLayout& layout);

/// Writes records in file order with the default column order, angles in
/// radians, 17 significant digits.
void export_fresnel(std::ostream& out, const FresnelDataset& dataset);

/// total − incident per record, in record order.
std::vector<cdouble> scattered_field(const FresnelDataset& dataset);

/// R e^{−ikR} u_scat.
cdouble near_to_far(cdouble u_scat, double radius, double k_physical);

/// 2π f / c in 1/m.
double physical_wavenumber(double frequency_ghz);
/// 2π f / c · unit_length.
double computational_wavenumber(double frequency_ghz, double unit_length_m = 0.04);

/// Unit polar vector e_θ at d (falls back to tangential_basis(d).e1 at the poles).
Vec3 polar_unit_vector(const Vec3& d);

/// Source position and propagation direction for a source record.
Vec3 source_position(double theta, double phi);

struct ComputationalData {
  FarFieldData data;  // mask {3}, observation = receivers (great circle), incidence = propagation directions
  double k = 0.0;
  double k_physical = 0.0;
};

/// Far-field data in computational units at one frequency: entry
/// U_ij = e_z u∞_ij q_jᵀ with q_j = e_θ(d_j) the recorded lab polarization tag,
/// u∞ from near_to_far and scaled by 1/unit_length.
ComputationalData to_computational_units(const FresnelDataset& dataset, double frequency_ghz);

/// Measurement records reproducing computational far-field data: the inverse of
/// to_computational_units. The incident column is the plane wave e_θ(d)_z
/// e^{ik d·x_r} at the receiver; the total is incident plus the radiated field
/// u∞ e^{ikR}/R. Observation points must lie on {z = 0}.
FresnelDataset fixture_from_far_field(const FarFieldData& data, const FresnelLayout& layout, double frequency_ghz);

}  // namespace mosm
