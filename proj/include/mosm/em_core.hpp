#pragma once

#include <memory>

#include "mosm/sphere_geometry.hpp"
#include "mosm/types.hpp"

namespace mosm {

/// Wavenumber, polarization anchor p and probe coefficients (α1, α2) shared by
/// the probe fields and the imaging function.
struct WaveContext {
  double k = 1.0;
  Vec3 p = Vec3(1.0, 0.0, 0.0);
  cdouble alpha1 = cdouble(1.0 / std::numbers::sqrt2, 0.0);
  cdouble alpha2 = cdouble(1.0 / std::numbers::sqrt2, 0.0);

  /// Throws std::invalid_argument unless k > 0, |p| > 0, |α1|² + |α2|² > 0.
  void validate() const;
};

/// j0(t) = sin t / t.
double sph_j0(double t);
/// j1(t) = sin t / t² − cos t / t.
double sph_j1(double t);
/// (cos t − j0(t)) / t², with a Taylor branch for t < 1e-3.
double cos_minus_j0_over_t2(double t);

/// q e^{ik x·d}. q must be orthogonal to d (|q·d| ≤ 1e-10 |q|).
CVec3 plane_wave(const Vec3& x, const Vec3& d, const CVec3& q, double k);

/// curl of plane_wave: ik (d × q) e^{ik x·d}.
CVec3 plane_wave_curl(const Vec3& x, const Vec3& d, const CVec3& q, double k);

/// (d × p) × d, the tangential projection of p; real.
Vec3 projected_polarization(const Vec3& d, const Vec3& p);

/// h(d) = α1 d×p + α2 (d×p)×d.
CVec3 probe_polarization(const Vec3& d, const WaveContext& ctx);

/// ψ_y(d) = h(d) e^{−ik d·y} on every direction of the set.
TangentialField probe_field(const Vec3& y, std::shared_ptr<const UnitDirectionSet> directions,
                            const WaveContext& ctx);

/// φ_y(d) = (d×p)×d e^{−ik d·y}; the range-test function of the factorization method.
TangentialField fm_test_function(const Vec3& y, std::shared_ptr<const UnitDirectionSet> directions,
                                 const Vec3& p, double k);

/// Resolution kernel W̃(z) = 4πi (z×p)(cos k|z| − j0(k|z|)) / (k|z|²).
///
/// Sign convention: W̃(z) = ∫_{S²} (d×p) e^{−ik d·z} ds(d) exactly, i.e. it is
/// the negative of the same integral taken with e^{+ik d·z}.
CVec3 w_kernel(const Vec3& z, const Vec3& p, double k);

/// Resolution kernel Ṽ(z). Equals ∫_{S²} ((d×p)×d) e^{±ik d·z} ds(d) (the
/// integrand is even in d, so both exponent signs agree). Ṽ(0) = (8π/3) p.
CVec3 v_kernel(const Vec3& z, const Vec3& p, double k);

/// Φ(x, y) = e^{ik|x−y|} / (4π|x−y|); k ≥ 0. Throws for x == y.
cdouble scalar_green(const Vec3& x, const Vec3& y, double k);

}  // namespace mosm
