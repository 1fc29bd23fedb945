#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "mosm/material.hpp"
#include "mosm/types.hpp"

namespace mosm {

/// Discrete volume potentials on a VolumeGrid, applied by FFT.
///
/// The Helmholtz Green's function is cut off at radius L (larger than the grid
/// diameter), so its Fourier transform is smooth and known in closed form. The
/// Toeplitz samples of K, (k² + ∇div)K and ∇K are obtained once by an inverse
/// FFT on an oversampled grid, then embedded in a 2N circulant.
class VolumeOperator {
 public:
  struct Options {
    /// L = truncation_factor · h · |N|.
    double truncation_factor = 1.2;
    /// Extra cells in the oversampled precomputation grid.
    int margin = 8;
  };

  /// Per-thread scratch space for apply().
  class Workspace {
   public:
    explicit Workspace(const VolumeOperator& op);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

   private:
    friend class VolumeOperator;
    std::array<cdouble*, 6> buf_{};
  };

  VolumeOperator(const VolumeGrid& grid, double k);
  VolumeOperator(const VolumeGrid& grid, double k, Options options);
  ~VolumeOperator();
  VolumeOperator(const VolumeOperator&) = delete;
  VolumeOperator& operator=(const VolumeOperator&) = delete;

  const VolumeGrid& grid() const noexcept { return grid_; }
  double k() const noexcept { return k_; }
  double truncation_radius() const noexcept { return L_; }

  /// Scattered parts of the coupled fields for full-grid densities:
  ///   out1 = (k² + ∇div)K ρ1 + curl K ρ2
  ///   out2 = k² curl K ρ1 + (k² + ∇div)K ρ2 + ρ2
  /// All arrays have grid().size() entries. Aliasing inputs and outputs is allowed.
  void apply(const CVec3* rho1, const CVec3* rho2, CVec3* out1, CVec3* out2, Workspace& ws) const;

  /// Scalar convolution with the Toeplitz samples of K (testing aid).
  void apply_scalar(const cdouble* rho, cdouble* out, Workspace& ws) const;

  /// Toeplitz sample at voxel offset m (|m_a| < N_a). component: 0 = K,
  /// 1..6 = (k²+∇div)K entries xx, yy, zz, xy, xz, yz, 7..9 = ∂_x, ∂_y, ∂_z of K.
  cdouble kernel_sample(int component, const std::array<int, 3>& offset) const;

 private:
  static constexpr int kComponents = 10;

  std::size_t padded_size() const noexcept { return padded_total_; }
  std::size_t padded_index(int i, int j, int l) const;
  void forward(cdouble* data) const;
  void backward(cdouble* data) const;
  void forward_pruned(cdouble* data) const;
  void backward_pruned(cdouble* data) const;

  VolumeGrid grid_;
  double k_;
  double L_;
  std::array<int, 3> pad_{};
  std::size_t padded_total_ = 0;
  // Circulant spectra, scaled by 1/(2N)³, one per component.
  std::vector<std::vector<cdouble>> spectra_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// ∫_{|x|<L} e^{ik|x|}/(4π|x|) e^{−iξ·x} dx as a function of s = |ξ|.
cdouble truncated_green_transform(double s, double k, double L);

}  // namespace mosm
