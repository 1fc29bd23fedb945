#include <doctest.h>

#include <sstream>

#include "mosm/farfield_operator.hpp"
#include "mosm/forward_solver.hpp"
#include "mosm/imaging.hpp"
#include "test_support.hpp"

using namespace mosm;

namespace {

std::shared_ptr<const UnitDirectionSet> fib(int n) {
  return std::make_shared<const UnitDirectionSet>(make_quasi_uniform_sphere(n));
}

WaveContext context(double k) {
  WaveContext ctx;
  ctx.k = k;
  ctx.p = Vec3(1.0, -1.0, 1.0).normalized();
  return ctx;
}

}  // namespace

TEST_CASE("mosm value: trivial cases") {
  auto s = fib(8);
  CHECK(mosm_value(FarFieldData(3.0, s, s), Vec3(0.1, 0.2, 0.3), context(3.0)) == 0.0);
  CHECK_THROWS_AS(MosmEvaluator(FarFieldData(3.0, s, s), context(3.5)), std::invalid_argument);

  // One nonzero entry U = I at (x̂_0, d_0): I(0) = w_x |w_d mask⊙h(d_0)|².
  auto one_obs = std::make_shared<const UnitDirectionSet>(UnitDirectionSet({Vec3::UnitY()}, {0.7}, Topology::Custom));
  auto one_inc = std::make_shared<const UnitDirectionSet>(UnitDirectionSet({Vec3::UnitZ()}, {0.3}, Topology::Custom));
  FarFieldData d(2.0, one_obs, one_inc);
  d.entry(0, 0) = CMat3::Identity();
  WaveContext ctx = context(2.0);
  ctx.p = Vec3::UnitX();
  ctx.alpha1 = cdouble(0.0, 2.0);
  ctx.alpha2 = 1.0;
  const CVec3 h = probe_polarization(Vec3::UnitZ(), ctx);  // (1, 2i, 0)
  CHECK(mosm_value(d, Vec3::Zero(), ctx) == doctest::Approx(0.7 * (0.3 * 0.3) * h.squaredNorm()).epsilon(1e-15));
  d.mask = ComponentMask::only(1);
  CHECK(mosm_value(d, Vec3::Zero(), ctx) == doctest::Approx(0.7 * (0.3 * 0.3) * std::norm(h[1])).epsilon(1e-15));

  // Great-circle apertures average over receivers.
  auto circle = std::make_shared<const UnitDirectionSet>(make_great_circle(10, Vec3::UnitZ()));
  const MosmEvaluator ev(FarFieldData(2.0, circle, s), context(2.0));
  for (double w : ev.outer_weights()) CHECK(w == doctest::Approx(0.1));
}

TEST_CASE("mosm value equals the squared norm of F applied to the probe") {
  auto s = fib(40);
  const FarFieldData data = born_sphere_dataset(s, s, Vec3(0.2, 0.1, -0.3), 0.5, cdouble(0.05, 0.02), 6.0);
  const WaveContext ctx = context(6.0);
  const auto op = assemble_operator(data);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ud(-1.5, 1.5);
  for (int t = 0; t < 50; ++t) {
    const Vec3 y(ud(gen), ud(gen), ud(gen));
    const auto out = op.apply(probe_field(y, s, ctx));
    double norm2 = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) norm2 += s->weight(i) * out[i].squaredNorm();
    CHECK(std::abs(mosm_value(data, y, ctx) - norm2) <= 1e-12 * norm2);
  }
}

TEST_CASE("scan localizes a sphere and does not depend on the worker count") {
  const Vec3 center(0.3, -0.2, 0.1);
  auto s = fib(60);
  const FarFieldData data = born_sphere_dataset(s, s, center, 0.4, 0.05, 5.0);
  const SamplingGrid grid = SamplingGrid::cube(1.0, 17);
  const IndicatorField a = scan(data, grid, context(5.0), 1), b = scan(data, grid, context(5.0), 3);
  CHECK(a.values == b.values);
  CHECK(a.values[a.argmax()] == 1.0);
  CHECK((grid.point(a.argmax()) - center).norm() <= std::sqrt(3.0) * grid.spacing(0));

  const IndicatorField raw = scan_raw(data, grid, context(5.0));
  CHECK(raw.values[7] == doctest::Approx(mosm_value(data, grid.point(7), context(5.0))).epsilon(1e-15));

  const IndicatorField zero = scan(FarFieldData(5.0, s, s), grid, context(5.0));
  CHECK(zero.all_zero);
}

TEST_CASE("isosurface thresholds") {
  IndicatorField f;
  f.grid = SamplingGrid::cube(1.0, 3);
  for (std::size_t i = 0; i < f.grid.size(); ++i) f.values.push_back(static_cast<double>(i % 5));
  f.values[13] = 9.0;
  f.values[20] = 9.0;
  f.normalize();
  CHECK(threshold_isosurface(f, 0.0).indices.size() == f.grid.size());
  CHECK(threshold_isosurface(f, 1.0).indices == std::vector<std::size_t>{13, 20});
  CHECK(f.argmax() == 13);
  const Isosurface none = threshold_isosurface(f, 1.5);
  CHECK(none.indices.empty());
  CHECK(none.empty_warning);
  std::ostringstream out;
  write_point_cloud(out, f, threshold_isosurface(f, 1.0));
  CHECK(out.str().rfind("x,y,z,value\n", 0) == 0);
}

TEST_CASE("slices") {
  IndicatorField f;
  f.grid = SamplingGrid(Vec3(-1.0, -2.0, -1.5), Vec3(1.0, 2.0, 1.5), {21, 41, 31});
  f.values.assign(f.grid.size(), 0.25);
  const Slice2D c = slice(f, 1, 0.3);
  CHECK(c.u.size() == 21);
  CHECK(c.v.size() == 31);
  for (double v : c.values) CHECK(v == 0.25);
  CHECK_THROWS_AS(slice(f, 1, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(slice(f, 3, 0.0), std::invalid_argument);

  // Gaussian bump: the slice peak sits at the projected center.
  const Vec3 c0(0.4, -0.6, 0.3);
  for (std::size_t i = 0; i < f.grid.size(); ++i) f.values[i] = std::exp(-(f.grid.point(i) - c0).squaredNorm() / 0.1);
  f.normalize();
  const Slice2D s = slice(f, 2, -0.5);
  std::size_t best = 0;
  for (std::size_t i = 0; i < s.values.size(); ++i)
    if (s.values[i] > s.values[best]) best = i;
  CHECK(s.u[best % s.u.size()] == doctest::Approx(0.4));
  CHECK(s.v[best / s.u.size()] == doctest::Approx(-0.6));
  CHECK(s.plane == doctest::Approx(-0.5));
  CHECK(count_components(s, 0.5 * s.values[best]) == 1);

  std::ostringstream out;
  write_slice_csv(out, s);
  CHECK(out.str().rfind("y\\x,", 0) == 0);
}

TEST_CASE("connected components and overlap") {
  const SamplingGrid g = SamplingGrid::cube(1.0, 5);
  CHECK(count_components(g, {}) == 0);
  CHECK(count_components(g, {g.index(0, 0, 0), g.index(1, 0, 0), g.index(3, 3, 3)}) == 2);
  CHECK(count_components(g, {g.index(0, 0, 0), g.index(1, 1, 0)}) == 2);  // diagonal neighbours are separate
  CHECK(jaccard({1, 2, 3}, {2, 3, 4}) == doctest::Approx(0.5));
  CHECK(jaccard({}, {}) == 1.0);
}

TEST_CASE("decay profile") {
  auto inc = fib(8000);
  auto obs = fib(30);
  const double k = 3.0, R = 0.5;
  const FarFieldData data = born_sphere_dataset(inc, obs, Vec3::Zero(), R, cdouble(0.01, 0.01), k);
  const WaveContext ctx = context(k);
  const double lambda = 2.0 * kPi / k;
  const Vec3 dir = Vec3(1.0, 0.3, 0.2).normalized();
  std::vector<Vec3> ray;
  std::vector<double> dist;
  for (int s = 0; s < 64; ++s) {
    dist.push_back(5.0 * lambda * std::pow(4.0, s / 63.0));
    ray.push_back((R + dist.back()) * dir);
  }
  const DecayFit fit = decay_profile(data, ray, dist, ctx);
  CHECK(fit.slope >= -2.6);
  CHECK(fit.slope <= -1.4);
  CHECK_FALSE(fit.non_physical);

  FarFieldData doubled = data;
  for (auto& e : doubled.entries) e *= 2.0;
  CHECK(decay_profile(doubled, ray, dist, ctx).slope == doctest::Approx(fit.slope).epsilon(1e-10));

  // Constant fake data evaluated at one point: no decay, flagged.
  auto few = fib(20);
  FarFieldData flat(k, few, few);
  for (std::size_t j = 0; j < few->size(); ++j)
    for (std::size_t i = 0; i < few->size(); ++i) flat.entry(i, j) = CMat3::Identity();
  std::vector<Vec3> near_ray;
  std::vector<double> near_dist;
  for (int s = 0; s < 16; ++s) {
    near_dist.push_back(1.0 + s);
    near_ray.push_back(Vec3::Zero());
  }
  const DecayFit constant = decay_profile(flat, near_ray, near_dist, ctx);
  CHECK(std::abs(constant.slope) <= 1e-12);
  CHECK(constant.non_physical);

  CHECK_THROWS_AS(decay_profile(data, std::vector<Vec3>(ray.begin(), ray.begin() + 7),
                                std::vector<double>(dist.begin(), dist.begin() + 7), ctx),
                  std::invalid_argument);
}

TEST_CASE("stability gap") {
  auto s = fib(30);
  const FarFieldData data = born_sphere_dataset(s, s, Vec3(0.1, 0.0, 0.2), 0.5, cdouble(0.05, 0.02), 6.0);
  const WaveContext ctx = context(6.0);
  const StabilityReport rep = stability_gap(data, {0.0, 0.3, 0.5}, {1, 2}, SamplingGrid::cube(1.0, 7), ctx);
  CHECK(rep.rows.size() == 6);
  CHECK(rep.all_hold());
  for (const auto& r : rep.rows) {
    if (r.delta == 0.0) {
      CHECK(r.max_gap == 0.0);
      CHECK(r.bound == 0.0);
    } else {
      CHECK(r.max_gap <= r.bound);
      CHECK(r.perturbation_ratio > 0.0);
    }
  }
  CHECK(rep.probe_norm_squared == doctest::Approx(probe_norm_squared(data, ctx)));
  CHECK(rep.operator_norm == doctest::Approx(operator_norm(data, ctx)));
}
