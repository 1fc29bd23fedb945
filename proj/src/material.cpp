#include "mosm/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mosm {

VolumeGrid VolumeGrid::cube(const Vec3& lower, double side, int n) {
  VolumeGrid g;
  g.lower = lower;
  g.n = {n, n, n};
  g.h = side / n;
  g.validate();
  return g;
}

std::array<int, 3> VolumeGrid::coords(std::size_t idx) const {
  const auto n0 = static_cast<std::size_t>(n[0]);
  const auto n1 = static_cast<std::size_t>(n[1]);
  return {static_cast<int>(idx % n0), static_cast<int>((idx / n0) % n1),
          static_cast<int>(idx / (n0 * n1))};
}

Vec3 VolumeGrid::center(std::size_t idx) const {
  const auto c = coords(idx);
  return lower + h * Vec3(c[0] + 0.5, c[1] + 0.5, c[2] + 0.5);
}

double VolumeGrid::points_per_wavelength(double k) const { return 2.0 * kPi / (k * h); }

void VolumeGrid::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("VolumeGrid: spacing must be positive");
  for (int v : n)
    if (v < 1) throw std::invalid_argument("VolumeGrid: voxel counts must be positive");
}

VoxelMaterial VoxelMaterial::dielectric(cdouble eps) {
  VoxelMaterial m;
  m.eps_r = eps * CMat3::Identity();
  return m;
}

bool VoxelMaterial::is_vacuum() const {
  return eps_r == CMat3::Identity() && inv_mu_r == CMat3::Identity() && xi.isZero(0.0) &&
         zeta.isZero(0.0);
}

Shape Shape::sphere(const Vec3& center, double radius) {
  Shape s;
  s.kind = Kind::Sphere;
  s.a = center;
  s.radius = radius;
  return s;
}

Shape Shape::box(const Vec3& lower, const Vec3& upper) {
  Shape s;
  s.kind = Kind::Box;
  s.a = lower;
  s.b = upper;
  return s;
}

Shape Shape::lshape(const Vec3& corner, const Vec3& extents, double thickness) {
  Shape s;
  s.kind = Kind::LShape;
  s.a = corner;
  s.b = extents;
  s.radius = thickness;
  return s;
}

Shape Shape::union_of(std::vector<Shape> parts) {
  Shape s;
  s.kind = Kind::Union;
  s.parts = std::move(parts);
  return s;
}

namespace {
bool in_box(const Vec3& x, const Vec3& lo, const Vec3& hi) {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}
}  // namespace

bool Shape::contains(const Vec3& x) const {
  switch (kind) {
    case Kind::Sphere: return (x - a).norm() <= radius;
    case Kind::Box: return in_box(x, a, b);
    case Kind::LShape: {
      const Vec3 hi = a + b;
      const Vec3 foot_hi(hi.x(), hi.y(), a.z() + radius);
      const Vec3 stem_hi(a.x() + radius, hi.y(), hi.z());
      return in_box(x, a, foot_hi) || in_box(x, a, stem_hi);
    }
    case Kind::Union:
      return std::any_of(parts.begin(), parts.end(), [&](const Shape& s) { return s.contains(x); });
  }
  return false;
}

MaterialModel::MaterialModel(VolumeGrid grid, std::vector<std::size_t> support,
                             std::vector<VoxelMaterial> tensors)
    : grid_(std::move(grid)), support_(std::move(support)), tensors_(std::move(tensors)) {
  grid_.validate();
  if (support_.size() != tensors_.size())
    throw std::invalid_argument("MaterialModel: support and tensor lists differ in length");
  if (!std::is_sorted(support_.begin(), support_.end()) ||
      std::adjacent_find(support_.begin(), support_.end()) != support_.end())
    throw std::invalid_argument("MaterialModel: support indices must be sorted and unique");
  if (!support_.empty() && support_.back() >= grid_.size())
    throw std::invalid_argument("MaterialModel: support index outside grid");
  for (std::size_t s = 0; s < tensors_.size(); ++s) {
    const VoxelMaterial& m = tensors_[s];
    for (const CMat3* t : {&m.eps_r, &m.inv_mu_r, &m.xi, &m.zeta}) {
      if ((*t - t->transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("MaterialModel: non-symmetric tensor at voxel " +
                                    std::to_string(support_[s]));
    }
  }
}

MaterialModel MaterialModel::from_shapes(const VolumeGrid& grid, const std::vector<ShapeRegion>& regions) {
  grid.validate();
  std::vector<std::size_t> support;
  std::vector<VoxelMaterial> tensors;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Vec3 x = grid.center(idx);
    const VoxelMaterial* hit = nullptr;
    for (const auto& r : regions)
      if (r.shape.contains(x)) hit = &r.material;
    if (hit != nullptr && !hit->is_vacuum()) {
      support.push_back(idx);
      tensors.push_back(*hit);
    }
  }
  return MaterialModel(grid, std::move(support), std::move(tensors));
}

MaterialModel MaterialModel::vacuum(const VolumeGrid& grid) { return MaterialModel(grid, {}, {}); }

VoxelMaterial MaterialModel::at(std::size_t voxel) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), voxel);
  if (it != support_.end() && *it == voxel) return tensors_[static_cast<std::size_t>(it - support_.begin())];
  return VoxelMaterial::vacuum();
}

bool MaterialModel::in_support(std::size_t voxel) const {
  return std::binary_search(support_.begin(), support_.end(), voxel);
}

CMat3 hermitian_part(const CMat3& a) { return 0.5 * (a + a.adjoint()); }

CMat3 antihermitian_part_over_i(const CMat3& a) { return (a - a.adjoint()) / (2.0 * kI); }

namespace {

double min_eigenvalue(const CMat3& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMat3> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

AssumptionReport validate_assumption_I(const MaterialModel& model, double k) {
  AssumptionReport r;
  const double ppw = model.grid().points_per_wavelength(k);
  if (ppw < 8.0)
    r.warnings.push_back("grid resolves only " + fmt(ppw) + " points per wavelength (< 8)");

  if (model.support().empty()) {
    // Homogeneous background: every inequality holds vacuously, but the vacuum
    // values would give α = β = 0.
    r.c1 = r.c2 = 1.0;
    r.alpha = r.beta = 0.0;
    r.coupling = 0.0;
    r.coupling_limit = 0.0;
    r.compliant = true;
    r.boundary_case = true;
    r.warnings.push_back("empty support: conditions hold vacuously; alpha = beta = 0 (no absorption)");
    return r;
  }

  double c1 = INFINITY, c2 = INFINITY, alpha = INFINITY, beta = INFINITY;
  double sup_xi = 0.0, sup_zeta = 0.0;
  for (const auto& m : model.tensors()) {
    for (const CMat3* t : {&m.eps_r, &m.inv_mu_r, &m.xi, &m.zeta})
      if ((*t - t->transpose()).cwiseAbs().maxCoeff() > 1e-12) r.symmetric = false;
    const CMat3 eff = m.eps_r - m.xi * m.inv_mu_r * m.zeta;
    c1 = std::min(c1, min_eigenvalue(hermitian_part(m.inv_mu_r)));
    c2 = std::min(c2, min_eigenvalue(hermitian_part(eff)));
    alpha = std::min(alpha, min_eigenvalue(-antihermitian_part_over_i(m.inv_mu_r)));
    beta = std::min(beta, min_eigenvalue(antihermitian_part_over_i(eff)));
    sup_xi = std::max(sup_xi, (m.inv_mu_r * m.xi).squaredNorm());
    sup_zeta = std::max(sup_zeta, (m.inv_mu_r * m.zeta).squaredNorm());
  }
  r.c1 = c1;
  r.c2 = c2;
  r.alpha = alpha;
  r.beta = beta;
  r.coupling = sup_xi + sup_zeta;
  r.coupling_limit = 2.0 * std::min(c1 * c2, alpha * beta);

  if (!r.symmetric) r.violations.push_back("tensors are not symmetric");
  if (!(c1 > 0.0)) r.violations.push_back("Re(inv_mu_r) not positive definite: c1 = " + fmt(c1));
  if (!(c2 > 0.0)) r.violations.push_back("Re(eps_r - xi inv_mu_r zeta) not positive definite: c2 = " + fmt(c2));
  if (!(alpha > 0.0)) r.violations.push_back("-Im(inv_mu_r) not positive definite: alpha = " + fmt(alpha));
  if (!(beta > 0.0)) r.violations.push_back("Im(eps_r - xi inv_mu_r zeta) not positive definite: beta = " + fmt(beta));
  if (!(r.coupling < r.coupling_limit))
    r.violations.push_back("coupling bound violated: " + fmt(r.coupling) + " >= " + fmt(r.coupling_limit));
  r.compliant = r.violations.empty();
  return r;
}

}  // namespace mosm
