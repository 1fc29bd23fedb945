#include "mosm/forward_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mosm/em_core.hpp"
#include "mosm/errors.hpp"
#include "mosm/parallel.hpp"

namespace mosm {

IncidentField sample_plane_wave(const VolumeGrid& grid, const Vec3& d, const CVec3& q, double k) {
  IncidentField inc;
  inc.f.resize(grid.size());
  inc.g.resize(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Vec3 x = grid.center(idx);
    inc.f[idx] = plane_wave(x, d, q, k);
    inc.g[idx] = plane_wave_curl(x, d, q, k);
  }
  return inc;
}

ForwardSolver::ForwardSolver(const MaterialModel& model, double k, ForwardOptions options)
    : model_(model), k_(k), options_(options), audit_(validate_assumption_I(model, k)) {
  if (!(k > 0.0)) throw std::invalid_argument("ForwardSolver: k must be positive");
  if (!audit_.compliant && !options_.force) {
    std::string msg = "ForwardSolver: material fails the well-posedness audit";
    for (const auto& v : audit_.violations) msg += "; " + v;
    throw std::invalid_argument(msg);
  }
  op_ = std::make_unique<VolumeOperator>(model_.grid(), k, options_.kernel);
  const std::size_t ns = model_.support().size();
  a11_.resize(ns);
  a12_.resize(ns);
  a21_.resize(ns);
  a22_.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const VoxelMaterial& m = model_.tensors()[s];
    a11_[s] = m.P() - m.xi * m.inv_mu_r * m.zeta;
    a12_[s] = (-kI / k) * (m.xi * m.inv_mu_r);
    a21_[s] = (kI * k) * (m.inv_mu_r * m.zeta);
    a22_[s] = m.Q();
  }
}

ForwardSolver::~ForwardSolver() = default;

void ForwardSolver::densities(const std::vector<CVec3>& w1, const std::vector<CVec3>& w2,
                              std::vector<CVec3>& rho1, std::vector<CVec3>& rho2) const {
  const auto& sup = model_.support();
  rho1.resize(sup.size());
  rho2.resize(sup.size());
  for (std::size_t s = 0; s < sup.size(); ++s) {
    const CVec3& e = w1[sup[s]];
    const CVec3& c = w2[sup[s]];
    rho1[s] = a11_[s] * e + a12_[s] * c;
    rho2[s] = a21_[s] * e + a22_[s] * c;
  }
}

ForwardSolution ForwardSolver::solve(const IncidentField& incident) const {
  const VolumeGrid& grid = model_.grid();
  if (incident.f.size() != grid.size() || incident.g.size() != grid.size())
    throw std::invalid_argument("ForwardSolver::solve: incident field size does not match grid");
  const auto& sup = model_.support();
  const std::size_t ns = sup.size();

  ForwardSolution sol;
  if (ns == 0) {
    sol.w1 = incident.f;
    sol.w2 = incident.g;
    sol.stats.converged = true;
    return sol;
  }

  VolumeOperator::Workspace ws(*op_);
  std::vector<CVec3> r1(grid.size(), CVec3::Zero()), r2(grid.size(), CVec3::Zero());
  std::vector<CVec3> o1(grid.size()), o2(grid.size());

  // x = [w1 on support; w2 on support], 6 complex values per voxel.
  auto apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    for (std::size_t s = 0; s < ns; ++s) {
      const CVec3 e = x.segment<3>(static_cast<Eigen::Index>(3 * s));
      const CVec3 c = x.segment<3>(static_cast<Eigen::Index>(3 * (ns + s)));
      r1[sup[s]] = a11_[s] * e + a12_[s] * c;
      r2[sup[s]] = a21_[s] * e + a22_[s] * c;
    }
    op_->apply(r1.data(), r2.data(), o1.data(), o2.data(), ws);
    y.resize(x.size());
    for (std::size_t s = 0; s < ns; ++s) {
      y.segment<3>(static_cast<Eigen::Index>(3 * s)) = x.segment<3>(static_cast<Eigen::Index>(3 * s)) - o1[sup[s]];
      y.segment<3>(static_cast<Eigen::Index>(3 * (ns + s))) =
          x.segment<3>(static_cast<Eigen::Index>(3 * (ns + s))) - o2[sup[s]];
    }
  };

  Eigen::VectorXcd b(static_cast<Eigen::Index>(6 * ns));
  for (std::size_t s = 0; s < ns; ++s) {
    b.segment<3>(static_cast<Eigen::Index>(3 * s)) = incident.f[sup[s]];
    b.segment<3>(static_cast<Eigen::Index>(3 * (ns + s))) = incident.g[sup[s]];
  }
  Eigen::VectorXcd x = b;
  sol.stats = gmres(apply, b, x, options_.gmres);
  if (!sol.stats.converged)
    throw SolverFailure("GMRES did not reach tolerance " + std::to_string(options_.gmres.tol) + " (residual " +
                            std::to_string(sol.stats.relative_residual) + ")",
                        sol.stats.relative_residual, sol.stats.iterations);

  // Fields everywhere from the converged support values.
  sol.rho1.resize(ns);
  sol.rho2.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const CVec3 e = x.segment<3>(static_cast<Eigen::Index>(3 * s));
    const CVec3 c = x.segment<3>(static_cast<Eigen::Index>(3 * (ns + s)));
    sol.rho1[s] = a11_[s] * e + a12_[s] * c;
    sol.rho2[s] = a21_[s] * e + a22_[s] * c;
    r1[sup[s]] = sol.rho1[s];
    r2[sup[s]] = sol.rho2[s];
  }
  op_->apply(r1.data(), r2.data(), o1.data(), o2.data(), ws);
  sol.w1.resize(grid.size());
  sol.w2.resize(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    sol.w1[idx] = incident.f[idx] + o1[idx];
    sol.w2[idx] = incident.g[idx] + o2[idx];
  }
  return sol;
}

namespace {

std::vector<CVec3> far_field_of_densities(const MaterialModel& model, const std::vector<CVec3>& rho1,
                                          const std::vector<CVec3>& rho2, const UnitDirectionSet& obs, double k) {
  const VolumeGrid& grid = model.grid();
  const auto& sup = model.support();
  std::vector<Vec3> centers(sup.size());
  for (std::size_t s = 0; s < sup.size(); ++s) centers[s] = grid.center(sup[s]);
  std::vector<CVec3> out(obs.size());
  const double vol = grid.voxel_volume();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Vec3& x = obs.point(i);
    CVec3 f1 = CVec3::Zero(), f2 = CVec3::Zero();
    for (std::size_t s = 0; s < sup.size(); ++s) {
      const cdouble ph = std::exp(-kI * (k * x.dot(centers[s])));
      f1 += ph * rho1[s];
      f2 += ph * rho2[s];
    }
    f1 *= vol;
    f2 *= vol;
    const CVec3 xc = x.cast<cdouble>();
    out[i] = (k * k * (f1 - xc.dot(f1) * xc) + kI * k * cross(xc, f2)) / kFourPi;
  }
  return out;
}

}  // namespace

std::vector<CVec3> ForwardSolver::far_field(const ForwardSolution& solution,
                                            const UnitDirectionSet& observation) const {
  if (model_.support().empty()) return std::vector<CVec3>(observation.size(), CVec3::Zero());
  return far_field_of_densities(model_, solution.rho1, solution.rho2, observation, k_);
}

ForwardSolution solve_forward(const MaterialModel& model, const IncidentField& incident, double k,
                              const ForwardOptions& options) {
  ForwardSolver solver(model, k, options);
  return solver.solve(incident);
}

std::vector<CVec3> far_field_from_solution(const MaterialModel& model, const std::vector<CVec3>& w1,
                                           const std::vector<CVec3>& w2, const UnitDirectionSet& observation,
                                           double k) {
  const auto& sup = model.support();
  std::vector<CVec3> rho1(sup.size()), rho2(sup.size());
  for (std::size_t s = 0; s < sup.size(); ++s) {
    const VoxelMaterial& m = model.tensors()[s];
    const CVec3& e = w1.at(sup[s]);
    const CVec3& c = w2.at(sup[s]);
    rho1[s] = (m.P() - m.xi * m.inv_mu_r * m.zeta) * e + (-kI / k) * (m.xi * m.inv_mu_r) * c;
    rho2[s] = (kI * k) * (m.inv_mu_r * m.zeta) * e + m.Q() * c;
  }
  return far_field_of_densities(model, rho1, rho2, observation, k);
}

FarFieldData generate_synthetic_dataset(const ForwardSolver& solver,
                                        std::shared_ptr<const UnitDirectionSet> incidence,
                                        std::shared_ptr<const UnitDirectionSet> observation, unsigned workers) {
  FarFieldData data(solver.k(), observation, incidence, ComponentMask::all());
  const double k = solver.k();
  parallel_for(incidence->size(), workers, [&](std::size_t j) {
    const Vec3& d = incidence->point(j);
    const TangentFrame fr = tangential_basis(d);
    std::vector<CVec3> u[2];
    const Vec3 basis[2] = {fr.e1, fr.e2};
    for (int b = 0; b < 2; ++b) {
      try {
        const ForwardSolution sol =
            solver.solve(sample_plane_wave(solver.model().grid(), d, basis[b].cast<cdouble>(), k));
        u[b] = solver.far_field(sol, *observation);
      } catch (const SolverFailure& e) {
        throw SolverFailure(std::string(e.what()) + " at incident direction " + std::to_string(j),
                            e.final_residual(), e.iterations(), j);
      }
    }
    for (std::size_t i = 0; i < observation->size(); ++i)
      data.entry(i, j) = u[0][i] * fr.e1.cast<cdouble>().transpose() + u[1][i] * fr.e2.cast<cdouble>().transpose();
  });
  return data;
}

std::vector<std::vector<CVec3>> solve_far_fields(const ForwardSolver& solver, const UnitDirectionSet& incidence,
                                                 const std::vector<Vec3>& polarizations,
                                                 const UnitDirectionSet& observation, unsigned workers) {
  if (polarizations.size() != incidence.size())
    throw std::invalid_argument("solve_far_fields: one polarization per incident direction");
  std::vector<std::vector<CVec3>> out(incidence.size());
  parallel_for(incidence.size(), workers, [&](std::size_t j) {
    try {
      const ForwardSolution sol = solver.solve(sample_plane_wave(solver.model().grid(), incidence.point(j),
                                                                 polarizations[j].cast<cdouble>(), solver.k()));
      out[j] = solver.far_field(sol, observation);
    } catch (const SolverFailure& e) {
      throw SolverFailure(std::string(e.what()) + " at incident direction " + std::to_string(j), e.final_residual(),
                          e.iterations(), j);
    }
  });
  return out;
}

double sphere_shape_factor(double s, double radius) {
  const double t = s * radius;
  const double vol = 4.0 * kPi / 3.0 * radius * radius * radius;
  if (t < 1e-4) return vol * (1.0 - t * t / 10.0);
  return 4.0 * kPi * radius * radius * radius * sph_j1(t) / t;
}

CVec3 born_sphere_far_field(const Vec3& xhat, const Vec3& d, const CVec3& q, const Vec3& center, double radius,
                            cdouble tau, double k) {
  const Vec3 diff = d - xhat;
  const double S = sphere_shape_factor(k * diff.norm(), radius);
  const CVec3 qt = q - q.dot(d.cast<cdouble>()) * d.cast<cdouble>();  // only the tangential part radiates
  const CVec3 xc = xhat.cast<cdouble>();
  const CVec3 proj = qt - xc.dot(qt) * xc;
  return (k * k * tau / kFourPi) * S * std::exp(kI * (k * diff.dot(center))) * proj;
}

FarFieldData born_sphere_dataset(std::shared_ptr<const UnitDirectionSet> incidence,
                                 std::shared_ptr<const UnitDirectionSet> observation, const Vec3& center,
                                 double radius, cdouble tau, double k) {
  FarFieldData data(k, observation, incidence, ComponentMask::all());
  for (std::size_t j = 0; j < incidence->size(); ++j) {
    const Vec3& d = incidence->point(j);
    const Mat3 Pd = Mat3::Identity() - d * d.transpose();
    for (std::size_t i = 0; i < observation->size(); ++i) {
      const Vec3& x = observation->point(i);
      const Mat3 Px = Mat3::Identity() - x * x.transpose();
      const Vec3 diff = d - x;
      const cdouble scale = (k * k * tau / kFourPi) * sphere_shape_factor(k * diff.norm(), radius) *
                            std::exp(kI * (k * diff.dot(center)));
      data.entry(i, j) = scale * (Px * Pd).cast<cdouble>();
    }
  }
  return data;
}

}  // namespace mosm
