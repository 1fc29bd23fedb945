#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mosm/em_core.hpp"
#include "mosm/far_field_data.hpp"
#include "mosm/indicator_field.hpp"

namespace mosm {

/// Far-field operator (F g)(x̂_i) = Σ_j w_j u∞(x̂_i, d_j) g(d_j) in tangential
/// coordinates: row 2i + a is e_a(x̂_i)·, column 2j + b is the coefficient of
/// e_b(d_j), with {e1, e2} from tangential_basis.
class DiscreteFarFieldOperator {
 public:
  explicit DiscreteFarFieldOperator(const FarFieldData& data);

  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  const UnitDirectionSet& observation() const { return *observation_; }
  const UnitDirectionSet& incidence() const { return *incidence_; }

  /// Square, full-sphere, equal sets and unmasked data: spectral diagnostics allowed.
  bool spectral_ready() const noexcept { return spectral_ready_; }

  /// Tangential coordinates (2n) of a field on the incidence set.
  Eigen::VectorXcd coordinates(const TangentialField& g) const;
  /// F g as 3-vectors on the observation set.
  std::vector<CVec3> apply(const TangentialField& g) const;

  /// W^{1/2} F W^{-1/2}: the matrix of F in the weighted L² inner product,
  /// i.e. an orthonormal-coordinates representation. Requires spectral_ready().
  Eigen::MatrixXcd symmetrized() const;

 private:
  std::shared_ptr<const UnitDirectionSet> observation_;
  std::shared_ptr<const UnitDirectionSet> incidence_;
  Eigen::MatrixXcd matrix_;
  bool spectral_ready_ = false;
};

DiscreteFarFieldOperator assemble_operator(const FarFieldData& data);

/// (S − Sᴴ)/(2i) of the symmetrized operator; exactly Hermitian.
/// Throws std::invalid_argument unless op.spectral_ready().
Eigen::MatrixXcd imaginary_part(const DiscreteFarFieldOperator& op);
/// (A − Aᴴ)/(2i) of a square matrix.
Eigen::MatrixXcd imaginary_part(const Eigen::MatrixXcd& a);

struct CoercivityReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// λ_min / λ_max (0 when λ_max ≤ 0).
  double relative_min = 0.0;
  Eigen::VectorXd spectrum;        // ascending
  Eigen::MatrixXcd eigenvectors;   // columns match spectrum
};

CoercivityReport coercivity_report(const Eigen::MatrixXcd& im_f);

/// "index,eigenvalue" rows in ascending order.
void write_spectrum_csv(std::ostream& out, const CoercivityReport& report);

struct FmCutoff {
  enum class Mode { Fixed, NoiseCalibrated };
  Mode mode = Mode::Fixed;
  double value = 1e-3;
  /// Threshold ratio actually used for a given spectrum.
  double ratio(const CoercivityReport& report) const;
};

/// Picard-series range test I(y) = [Σ_j |⟨φ_y, ψ_j⟩|² / λ_j]⁻¹ over eigenpairs
/// with λ_j > cutoff·λ_max, normalized to max 1. Throws DegenerateSpectrum when
/// nothing survives the cutoff.
IndicatorField fm_indicator(const CoercivityReport& report, const DiscreteFarFieldOperator& op,
                            const SamplingGrid& grid, const Vec3& p, double k, FmCutoff cutoff = {},
                            unsigned workers = 0);

/// Single-superposition orthogonality sampling comparator
/// I(y) = Σ_j w_j |Σ_i w_i q(x̂_i)·(mask ⊙ U_ij q(d_j)) e^{ik x̂_i·y}|², q(v) = (v×p)×v,
/// normalized to max 1.
IndicatorField osm_indicator(const FarFieldData& data, const SamplingGrid& grid, const Vec3& p,
                             unsigned workers = 0);

}  // namespace mosm
