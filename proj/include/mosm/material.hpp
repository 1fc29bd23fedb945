#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mosm/types.hpp"

namespace mosm {

/// Uniform voxel grid. Voxel (i, j, l) has center lower + h (i + ½, j + ½, l + ½);
/// linear index i + n0 (j + n1 l), x fastest.
struct VolumeGrid {
  Vec3 lower = Vec3::Zero();
  std::array<int, 3> n{1, 1, 1};
  double h = 1.0;

  /// Cubic grid of n³ voxels covering [lower, upper] (upper − lower must be
  /// equal on all axes).
  static VolumeGrid cube(const Vec3& lower, double side, int n);

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  Vec3 upper() const { return lower + h * Vec3(n[0], n[1], n[2]); }
  std::size_t index(int i, int j, int l) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(l));
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3 center(std::size_t idx) const;
  double voxel_volume() const { return h * h * h; }
  /// 2π / (k h).
  double points_per_wavelength(double k) const;

  /// Throws std::invalid_argument on non-positive spacing or counts.
  void validate() const;
};

/// Constitutive tensors of one voxel: ε_r, μ_r⁻¹, ξ, ζ.
struct VoxelMaterial {
  CMat3 eps_r = CMat3::Identity();
  CMat3 inv_mu_r = CMat3::Identity();
  CMat3 xi = CMat3::Zero();
  CMat3 zeta = CMat3::Zero();

  static VoxelMaterial vacuum() { return {}; }
  /// Permittivity-only isotropic material.
  static VoxelMaterial dielectric(cdouble eps);

  CMat3 P() const { return eps_r - CMat3::Identity(); }
  CMat3 Q() const { return CMat3::Identity() - inv_mu_r; }
  bool is_vacuum() const;
};

/// Geometric primitives for building voxel materials.
struct Shape {
  enum class Kind { Sphere, Box, LShape, Union };
  Kind kind = Kind::Sphere;
  Vec3 a = Vec3::Zero();  // sphere center | box lower | L-shape corner
  Vec3 b = Vec3::Zero();  // box upper | L-shape extents (sx, sy, sz)
  double radius = 0.0;    // sphere radius | L-shape bar thickness
  std::vector<Shape> parts;

  static Shape sphere(const Vec3& center, double radius);
  static Shape box(const Vec3& lower, const Vec3& upper);
  /// L in the x–z plane extruded along y: a bar along x of height `thickness`
  /// at the bottom and a bar along z of width `thickness` at the low-x side.
  static Shape lshape(const Vec3& corner, const Vec3& extents, double thickness);
  static Shape union_of(std::vector<Shape> parts);

  bool contains(const Vec3& x) const;
};

struct ShapeRegion {
  Shape shape;
  VoxelMaterial material;
};

/// Voxel-sampled bianisotropic medium. Only support voxels carry tensors;
/// every other voxel is exactly vacuum.
class MaterialModel {
 public:
  /// Throws std::invalid_argument when any tensor is not symmetric within 1e-12.
  MaterialModel(VolumeGrid grid, std::vector<std::size_t> support, std::vector<VoxelMaterial> tensors);

  /// Voxelizes regions by voxel-center sampling; later regions override earlier ones.
  static MaterialModel from_shapes(const VolumeGrid& grid, const std::vector<ShapeRegion>& regions);
  static MaterialModel vacuum(const VolumeGrid& grid);

  const VolumeGrid& grid() const noexcept { return grid_; }
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  const std::vector<VoxelMaterial>& tensors() const noexcept { return tensors_; }
  /// Material at a grid voxel (vacuum off the support).
  VoxelMaterial at(std::size_t voxel) const;
  bool in_support(std::size_t voxel) const;

 private:
  VolumeGrid grid_;
  std::vector<std::size_t> support_;  // sorted voxel indices
  std::vector<VoxelMaterial> tensors_;
};

/// Result of auditing the symmetry / ellipticity / absorption / coupling
/// conditions that guarantee a well-posed, coercive problem.
struct AssumptionReport {
  bool symmetric = true;
  double c1 = 1.0;     // min Re-part eigenvalue of μ_r⁻¹
  double c2 = 1.0;     // min Re-part eigenvalue of ε_r − ξ μ_r⁻¹ ζ
  double alpha = 0.0;  // min eigenvalue of −Im(μ_r⁻¹)
  double beta = 0.0;   // min eigenvalue of Im(ε_r − ξ μ_r⁻¹ ζ)
  double coupling = 0.0;        // sup|μ_r⁻¹ξ|_F² + sup|μ_r⁻¹ζ|_F²
  double coupling_limit = 0.0;  // 2 min{c1 c2, α β}
  bool compliant = false;
  bool boundary_case = false;  // conditions hold only vacuously or with equality
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
};

AssumptionReport validate_assumption_I(const MaterialModel& model, double k);

/// Hermitian part (A + Aᴴ)/2 and "imaginary" part (A − Aᴴ)/(2i).
CMat3 hermitian_part(const CMat3& a);
CMat3 antihermitian_part_over_i(const CMat3& a);

}  // namespace mosm
