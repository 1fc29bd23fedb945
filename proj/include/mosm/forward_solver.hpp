#pragma once

#include <memory>
#include <vector>

#include "mosm/far_field_data.hpp"
#include "mosm/gmres.hpp"
#include "mosm/material.hpp"
#include "mosm/sphere_geometry.hpp"
#include "mosm/volume_operator.hpp"

namespace mosm {

/// Incident fields sampled at voxel centers: f = E_in, g = curl E_in.
struct IncidentField {
  std::vector<CVec3> f;
  std::vector<CVec3> g;
};

IncidentField sample_plane_wave(const VolumeGrid& grid, const Vec3& d, const CVec3& q, double k);

struct ForwardOptions {
  GmresOptions gmres;
  /// Solve even when the material fails the well-posedness audit.
  bool force = false;
  VolumeOperator::Options kernel;
};

/// Coupled fields w1 = E, w2 = curl E on the whole grid plus the induced
/// densities on the support.
struct ForwardSolution {
  std::vector<CVec3> w1;
  std::vector<CVec3> w2;
  std::vector<CVec3> rho1;  // support order
  std::vector<CVec3> rho2;
  GmresResult stats;
};

/// Volume integral equation solver for one material and wavenumber.
///
/// Unknowns are (w1, w2) on the support voxels only. Each operator application
/// forms the densities ρ1 = (P − ξμ⁻¹ζ)w1 − (i/k)ξμ⁻¹w2 and
/// ρ2 = ikμ⁻¹ζw1 + Qw2, then applies the FFT volume potentials.
class ForwardSolver {
 public:
  /// Throws std::invalid_argument for a non-compliant material unless forced.
  ForwardSolver(const MaterialModel& model, double k, ForwardOptions options = {});
  ~ForwardSolver();

  const MaterialModel& model() const noexcept { return model_; }
  double k() const noexcept { return k_; }
  const AssumptionReport& audit() const noexcept { return audit_; }

  /// Thread-safe. Throws SolverFailure when GMRES misses the tolerance.
  ForwardSolution solve(const IncidentField& incident) const;

  /// Densities on the support for given full-grid fields.
  void densities(const std::vector<CVec3>& w1, const std::vector<CVec3>& w2, std::vector<CVec3>& rho1,
                 std::vector<CVec3>& rho2) const;

  /// u∞(x̂) = (1/4π)[k² x̂×ρ̂1×x̂ + ik x̂×ρ̂2], ρ̂(ξ) = h³ Σ ρ_j e^{−iξ·y_j} at ξ = kx̂.
  std::vector<CVec3> far_field(const ForwardSolution& solution, const UnitDirectionSet& observation) const;

 private:
  MaterialModel model_;
  double k_;
  ForwardOptions options_;
  AssumptionReport audit_;
  std::unique_ptr<VolumeOperator> op_;
  // Per support voxel: ρ1 = a11 w1 + a12 w2, ρ2 = a21 w1 + a22 w2.
  std::vector<CMat3> a11_, a12_, a21_, a22_;
};

/// Convenience wrapper around ForwardSolver::solve.
ForwardSolution solve_forward(const MaterialModel& model, const IncidentField& incident, double k,
                              const ForwardOptions& options = {});

/// Far field of already solved fields.
std::vector<CVec3> far_field_from_solution(const MaterialModel& model, const std::vector<CVec3>& w1,
                                           const std::vector<CVec3>& w2, const UnitDirectionSet& observation,
                                           double k);

/// Full far-field matrices: two solves per incident direction with the tangent
/// frame {e1, e2} of d, U = u(e1) e1ᵀ + u(e2) e2ᵀ so that U d = 0. Directions
/// are solved concurrently; SolverFailure is rethrown with the direction index.
FarFieldData generate_synthetic_dataset(const ForwardSolver& solver,
                                        std::shared_ptr<const UnitDirectionSet> incidence,
                                        std::shared_ptr<const UnitDirectionSet> observation, unsigned workers = 0);

/// Far fields for one polarization per incident direction (one solve each),
/// result[j][i] = u∞(x̂_i, d_j, q_j). Solved concurrently like the dataset.
std::vector<std::vector<CVec3>> solve_far_fields(const ForwardSolver& solver, const UnitDirectionSet& incidence,
                                                 const std::vector<Vec3>& polarizations,
                                                 const UnitDirectionSet& observation, unsigned workers = 0);

/// First-order (Born) far field of a homogeneous sphere with ε_r = (1 + τ)I:
/// (k²τ/4π) (I − x̂x̂ᵀ) q S(k|d − x̂|R) e^{ik(d−x̂)·c}, S(t) = 4πR³ j1(t)/t.
CVec3 born_sphere_far_field(const Vec3& xhat, const Vec3& d, const CVec3& q, const Vec3& center, double radius,
                            cdouble tau, double k);

/// Sphere shape factor ∫_{|y|<R} e^{iξ·y} dy for |ξ| = s.
double sphere_shape_factor(double s, double radius);

/// Dataset of Born far fields with the same entry convention as
/// generate_synthetic_dataset: U = P_x̂ P_d scaled by the Born factor.
FarFieldData born_sphere_dataset(std::shared_ptr<const UnitDirectionSet> incidence,
                                 std::shared_ptr<const UnitDirectionSet> observation, const Vec3& center,
                                 double radius, cdouble tau, double k);

}  // namespace mosm
