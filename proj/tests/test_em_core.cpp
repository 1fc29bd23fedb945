#include <doctest.h>

#include "mosm/em_core.hpp"
#include "test_support.hpp"

using namespace mosm;

TEST_CASE("plane wave") {
  const CVec3 q(1.0, 0.0, 0.0);
  CHECK((plane_wave(Vec3::Zero(), Vec3::UnitZ(), q, 12.0) - q).norm() == 0.0);
  const CVec3 u = plane_wave(Vec3(0.0, 0.0, kPi / 12.0), Vec3::UnitZ(), q, 12.0);
  CHECK((u - CVec3(-1.0, 0.0, 0.0)).norm() <= 1e-15);
  CHECK_THROWS_AS(plane_wave(Vec3::Zero(), Vec3::UnitZ(), CVec3(0.0, 0.0, 1.0), 1.0), std::invalid_argument);

  // curl(q e^{ik x·d}) = ik d×q e^{ik x·d}; checked by central differences.
  const Vec3 d = Vec3(1.0, 2.0, 2.0) / 3.0, x(0.3, -0.2, 0.1);
  const CVec3 qq = tangential_basis(d).e1.cast<cdouble>();
  const double k = 2.5, h = 1e-5;
  CVec3 curl = CVec3::Zero();
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = Vec3::Unit(a) * h;
    const CVec3 du = (plane_wave(x + e, d, qq, k) - plane_wave(x - e, d, qq, k)) / (2.0 * h);
    // curl_i += ε_{i a j} ∂_a u_j
    curl[(a + 2) % 3] += du[(a + 1) % 3];
    curl[(a + 1) % 3] -= du[(a + 2) % 3];
  }
  CHECK((curl - plane_wave_curl(x, d, qq, k)).norm() <= 1e-8);
}

TEST_CASE("complex cross product is bilinear") {
  std::mt19937_64 gen(8);
  const CVec3 a = test::random_cvec(gen), b = test::random_cvec(gen);
  const cdouble s(0.3, -1.7);
  CHECK((cross(s * a, b) - s * cross(a, b)).norm() <= 1e-14 * a.norm() * b.norm());
  CHECK((cross(a, b) + cross(b, a)).norm() == 0.0);
  const Vec3 x(1.0, 2.0, 3.0), y(-0.5, 0.25, 2.0);
  CHECK((cross(x.cast<cdouble>(), y.cast<cdouble>()) - x.cross(y).cast<cdouble>()).norm() == 0.0);
}

TEST_CASE("projected polarization of the experiment's incident wave") {
  const Vec3 p = Vec3(1.0, -1.0, 1.0) / std::sqrt(3.0);
  const Vec3 q = projected_polarization(Vec3::UnitX(), p);
  CHECK((q - Vec3(0.0, -1.0, 1.0) / std::sqrt(3.0)).norm() <= 1e-15);
}

TEST_CASE("probe polarization") {
  WaveContext ctx;
  ctx.p = Vec3::UnitX();
  ctx.alpha1 = 1.0;
  ctx.alpha2 = 0.0;
  CHECK((probe_polarization(Vec3::UnitZ(), ctx) - CVec3(0.0, 1.0, 0.0)).norm() == 0.0);
  ctx.alpha1 = 0.0;
  ctx.alpha2 = 1.0;
  CHECK((probe_polarization(Vec3::UnitZ(), ctx) - CVec3(1.0, 0.0, 0.0)).norm() == 0.0);
  CHECK(probe_polarization(Vec3::UnitX(), ctx).norm() == 0.0);

  ctx.p = Vec3(0.3, -0.4, 0.9);
  ctx.alpha1 = cdouble(0.6, 0.2);
  ctx.alpha2 = cdouble(-0.3, 0.7);
  std::mt19937_64 gen(11);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vec3 d = test::random_unit(gen);
    const CVec3 h = probe_polarization(d, ctx);
    if (h.norm() > 0.0) worst = std::max(worst, std::abs(d.cast<cdouble>().dot(h)) / h.norm());
  }
  CHECK(worst < 1e-12);

  WaveContext bad;
  bad.p = Vec3::Zero();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.p = Vec3::UnitX();
  bad.k = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("probe and test functions on a direction set") {
  auto dirs = std::make_shared<const UnitDirectionSet>(make_quasi_uniform_sphere(50));
  WaveContext ctx;
  ctx.k = 4.0;
  ctx.p = Vec3(1.0, -1.0, 1.0).normalized();
  const Vec3 y(0.2, -0.7, 0.4);
  const TangentialField at0 = probe_field(Vec3::Zero(), dirs, ctx);
  const TangentialField plus = probe_field(y, dirs, ctx), minus = probe_field(-y, dirs, ctx);
  for (std::size_t i = 0; i < dirs->size(); ++i) {
    const CVec3 h = probe_polarization(dirs->point(i), ctx);
    CHECK((at0[i] - h).norm() == 0.0);
    CHECK(std::abs(plus[i].norm() - h.norm()) <= 1e-14);
    // h real: ψ_y = conj(ψ_{−y}).
    CHECK((plus[i] - minus[i].conjugate()).norm() <= 1e-14);
  }

  auto pole = std::make_shared<const UnitDirectionSet>(
      UnitDirectionSet({Vec3::UnitZ()}, {1.0}, Topology::Custom));
  const TangentialField phi = fm_test_function(Vec3::Zero(), pole, Vec3::UnitX(), 3.0);
  CHECK((phi[0] - CVec3(1.0, 0.0, 0.0)).norm() == 0.0);
  const TangentialField phi2 = fm_test_function(y, dirs, ctx.p, ctx.k);
  for (std::size_t i = 0; i < dirs->size(); ++i)
    CHECK(std::abs(dirs->point(i).cast<cdouble>().dot(phi2[i])) <= 1e-12 * std::max(1.0, phi2[i].norm()));
}

TEST_CASE("resolution kernels against brute-force spherical quadrature") {
  const Vec3 p = Vec3(1.0, -1.0, 1.0).normalized();
  const double k = 12.0;
  CHECK(w_kernel(2.0 * p, p, k).norm() == 0.0);

  // Small-argument limit: cos t − j0(t) ≈ −t²/3.
  const Vec3 zs = Vec3(1.0, 1.0, 0.0).normalized() * 1e-7;
  CHECK((v_kernel(zs, p, k) - (8.0 * kPi / 3.0) * p.cast<cdouble>()).norm() <= 1e-9);

  const test::SphereRule rule = test::product_rule(40, 50);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ud(0.1, 20.0);
  for (int t = 0; t < 20; ++t) {
    const Vec3 z = test::random_unit(gen) * (ud(gen) / k);
    CVec3 w = CVec3::Zero(), v = CVec3::Zero();
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      const Vec3& d = rule.points[i];
      const cdouble e = rule.weights[i] * std::exp(cdouble(0.0, -k * d.dot(z)));
      w += e * d.cross(p).cast<cdouble>();
      v += e * projected_polarization(d, p).cast<cdouble>();
    }
    CHECK((w_kernel(z, p, k) - w).norm() <= 1e-3 * w.norm());
    CHECK((v_kernel(z, p, k) - v).norm() <= 1e-3 * v.norm());
  }
}

TEST_CASE("scalar Green's function") {
  CHECK(std::abs(scalar_green(Vec3::Zero(), Vec3::UnitX(), 0.0) - 1.0 / (4.0 * kPi)) <= 1e-16);
  const cdouble g = scalar_green(Vec3::Zero(), Vec3(0.0, 0.5, 0.0), 4.0 * kPi);
  CHECK(std::abs(g - 1.0 / (4.0 * kPi * 0.5)) <= 1e-14);
  CHECK_THROWS_AS(scalar_green(Vec3::UnitX(), Vec3::UnitX(), 1.0), std::invalid_argument);
}

TEST_CASE("spherical Bessel functions near zero") {
  CHECK(sph_j0(1e-9) == doctest::Approx(1.0));
  CHECK(sph_j1(1e-6) == doctest::Approx(1e-6 / 3.0).epsilon(1e-9));
  for (double t : {1e-4, 5e-4, 2e-3, 0.5, 3.0})
    CHECK(cos_minus_j0_over_t2(t) == doctest::Approx((std::cos(t) - std::sin(t) / t) / (t * t)).epsilon(t < 1e-3 ? 1e-4 : 1e-9));
}
