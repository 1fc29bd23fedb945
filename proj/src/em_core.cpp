#include "mosm/em_core.hpp"

#include <cmath>
#include <stdexcept>

namespace mosm {

void WaveContext::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("WaveContext: k must be > 0");
  if (!(p.norm() > 0.0)) throw std::invalid_argument("WaveContext: p must be nonzero");
  if (!(std::norm(alpha1) + std::norm(alpha2) > 0.0))
    throw std::invalid_argument("WaveContext: |alpha1|^2 + |alpha2|^2 must be > 0");
}

double sph_j0(double t) {
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

double sph_j1(double t) {
  if (std::abs(t) < 1e-3) {
    const double t2 = t * t;
    return t / 3.0 * (1.0 - t2 / 10.0 + t2 * t2 / 280.0);
  }
  return std::sin(t) / (t * t) - std::cos(t) / t;
}

double cos_minus_j0_over_t2(double t) {
  // cos t − j0(t) = −t j1(t); series −1/3 + t²/30 − t⁴/840 below the cutoff.
  if (std::abs(t) < 1e-3) {
    const double t2 = t * t;
    return -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0;
  }
  return (std::cos(t) - std::sin(t) / t) / (t * t);
}

CVec3 plane_wave(const Vec3& x, const Vec3& d, const CVec3& q, double k) {
  const cdouble qd = q.dot(d.cast<cdouble>());
  if (std::abs(qd) > 1e-10 * q.norm())
    throw std::invalid_argument("plane_wave: polarization is not orthogonal to direction");
  return q * std::exp(kI * (k * x.dot(d)));
}

CVec3 plane_wave_curl(const Vec3& x, const Vec3& d, const CVec3& q, double k) {
  const CVec3 e = plane_wave(x, d, q, k);
  return (kI * k) * cross(d.cast<cdouble>(), e);
}

Vec3 projected_polarization(const Vec3& d, const Vec3& p) { return d.cross(p).cross(d); }

CVec3 probe_polarization(const Vec3& d, const WaveContext& ctx) {
  const Vec3 dxp = d.cross(ctx.p);
  const Vec3 dxpxd = dxp.cross(d);
  return ctx.alpha1 * dxp.cast<cdouble>() + ctx.alpha2 * dxpxd.cast<cdouble>();
}

TangentialField probe_field(const Vec3& y, std::shared_ptr<const UnitDirectionSet> directions,
                            const WaveContext& ctx) {
  std::vector<CVec3> values(directions->size());
  for (std::size_t j = 0; j < directions->size(); ++j) {
    const Vec3& d = directions->point(j);
    values[j] = probe_polarization(d, ctx) * std::exp(-kI * (ctx.k * d.dot(y)));
  }
  return TangentialField(std::move(directions), std::move(values));
}

TangentialField fm_test_function(const Vec3& y, std::shared_ptr<const UnitDirectionSet> directions,
                                 const Vec3& p, double k) {
  WaveContext ctx;
  ctx.k = k;
  ctx.p = p;
  ctx.alpha1 = 0.0;
  ctx.alpha2 = 1.0;
  return probe_field(y, std::move(directions), ctx);
}

CVec3 w_kernel(const Vec3& z, const Vec3& p, double k) {
  const double t = k * z.norm();
  // (cos t − j0)/(k|z|²) = k (cos t − j0)/t².
  const double radial = k * cos_minus_j0_over_t2(t);
  return (4.0 * kPi * kI * radial) * z.cross(p).cast<cdouble>();
}

CVec3 v_kernel(const Vec3& z, const Vec3& p, double k) {
  const double r = z.norm();
  const double t = k * r;
  const Vec3 zhat = r > 0.0 ? Vec3(z / r) : Vec3::Zero();
  const double pz = p.dot(zhat);
  const double f = cos_minus_j0_over_t2(t);
  const double j0 = sph_j0(t);
  const Vec3 v = 4.0 * kPi * (p - pz * zhat) * j0 - 12.0 * kPi * (pz * zhat - p / 3.0) * f;
  return v.cast<cdouble>();
}

cdouble scalar_green(const Vec3& x, const Vec3& y, double k) {
  const double r = (x - y).norm();
  if (!(r > 0.0)) throw std::invalid_argument("scalar_green: coincident points");
  if (k < 0.0) throw std::invalid_argument("scalar_green: k must be >= 0");
  return std::exp(kI * (k * r)) / (4.0 * kPi * r);
}

}  // namespace mosm
