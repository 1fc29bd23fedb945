#include "mosm/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <Eigen/SVD>

#include "mosm/format.hpp"
#include "mosm/parallel.hpp"

namespace mosm {

namespace {

std::vector<double> outer_weights_for(const FarFieldData& data) {
  const UnitDirectionSet& obs = *data.observation;
  if (obs.topology() == Topology::GreatCircle) return std::vector<double>(obs.size(), 1.0 / obs.size());
  return obs.weights();
}

void check_wavenumber(const FarFieldData& data, const WaveContext& ctx) {
  ctx.validate();
  if (std::abs(data.k - ctx.k) > 1e-12 * ctx.k)
    throw std::invalid_argument("data wavenumber " + fmt_real(data.k) + " does not match context " +
                                fmt_real(ctx.k));
}

}  // namespace

MosmEvaluator::MosmEvaluator(const FarFieldData& data, const WaveContext& ctx)
    : data_(&data), ctx_(ctx), omega_(outer_weights_for(data)) {
  data.validate();
  check_wavenumber(data, ctx);
  const std::size_t m = data.n_obs(), n = data.n_inc();
  v_.resize(m * n);
  for (std::size_t j = 0; j < n; ++j) {
    const CVec3 h = probe_polarization(data.incidence->point(j), ctx);
    const double w = data.incidence->weight(j);
    for (std::size_t i = 0; i < m; ++i) v_[j * m + i] = w * data.mask.apply(data.entry(i, j) * h);
  }
}

double MosmEvaluator::value(const Vec3& y) const {
  const std::size_t m = data_->n_obs(), n = data_->n_inc();
  std::vector<CVec3> acc(m, CVec3::Zero());
  for (std::size_t j = 0; j < n; ++j) {
    const cdouble ph = std::exp(-kI * (ctx_.k * data_->incidence->point(j).dot(y)));
    const CVec3* row = &v_[j * m];
    for (std::size_t i = 0; i < m; ++i) acc[i] += row[i] * ph;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += omega_[i] * acc[i].squaredNorm();
  return total;
}

double mosm_value(const FarFieldData& data, const Vec3& y, const WaveContext& ctx) {
  return MosmEvaluator(data, ctx).value(y);
}

IndicatorField scan_raw(const FarFieldData& data, const SamplingGrid& grid, const WaveContext& ctx,
                        unsigned workers) {
  const MosmEvaluator eval(data, ctx);
  IndicatorField field;
  field.grid = grid;
  field.values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), workers, [&](std::size_t s) { field.values[s] = eval.value(grid.point(s)); });
  return field;
}

IndicatorField scan(const FarFieldData& data, const SamplingGrid& grid, const WaveContext& ctx, unsigned workers) {
  IndicatorField field = scan_raw(data, grid, ctx, workers);
  field.normalize();
  return field;
}

Isosurface threshold_isosurface(const IndicatorField& field, double isovalue) {
  Isosurface iso;
  for (std::size_t idx = 0; idx < field.values.size(); ++idx)
    if (field.values[idx] >= isovalue) iso.indices.push_back(idx);
  iso.empty_warning = iso.indices.empty();
  return iso;
}

void write_point_cloud(std::ostream& out, const IndicatorField& field, const Isosurface& set) {
  out << "x,y,z,value\n";
  for (std::size_t idx : set.indices) {
    const Vec3 y = field.grid.point(idx);
    out << fmt_real(y.x()) << ',' << fmt_real(y.y()) << ',' << fmt_real(y.z()) << ',' << fmt_real(field.values[idx])
        << '\n';
  }
}

Slice2D slice(const IndicatorField& field, int axis, double offset) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("slice: axis must be 0, 1 or 2");
  const SamplingGrid& g = field.grid;
  if (!(offset >= g.lower[axis] && offset <= g.upper[axis]))
    throw std::invalid_argument("slice: offset " + fmt_real(offset) + " outside the sampling box");
  const int layer = std::clamp(static_cast<int>(std::lround((offset - g.lower[axis]) / g.spacing(axis))), 0,
                               g.n[axis] - 1);
  const int ua = axis == 0 ? 1 : 0;
  const int va = axis == 2 ? 1 : 2;
  Slice2D s;
  s.axis = axis;
  s.plane = g.coordinate(axis, layer);
  for (int c = 0; c < g.n[ua]; ++c) s.u.push_back(g.coordinate(ua, c));
  for (int r = 0; r < g.n[va]; ++r) s.v.push_back(g.coordinate(va, r));
  s.values.resize(s.u.size() * s.v.size());
  for (int r = 0; r < g.n[va]; ++r)
    for (int c = 0; c < g.n[ua]; ++c) {
      std::array<int, 3> ijk{};
      ijk[static_cast<std::size_t>(axis)] = layer;
      ijk[static_cast<std::size_t>(ua)] = c;
      ijk[static_cast<std::size_t>(va)] = r;
      s.values[static_cast<std::size_t>(r) * s.u.size() + static_cast<std::size_t>(c)] =
          field.values[g.index(ijk[0], ijk[1], ijk[2])];
    }
  return s;
}

void write_slice_csv(std::ostream& out, const Slice2D& s) {
  static const char* names = "xyz";
  const int ua = s.axis == 0 ? 1 : 0;
  const int va = s.axis == 2 ? 1 : 2;
  out << names[va] << '\\' << names[ua];
  for (double u : s.u) out << ',' << fmt_real(u);
  out << '\n';
  for (std::size_t r = 0; r < s.v.size(); ++r) {
    out << fmt_real(s.v[r]);
    for (std::size_t c = 0; c < s.u.size(); ++c) out << ',' << fmt_real(s.at(r, c));
    out << '\n';
  }
}

namespace {

// Rows 3i + r: √ω_i (mask ⊙ U_ij e_b(d_j))_r √w_j in column 2j + b.
Eigen::MatrixXcd weighted_full_matrix(const FarFieldData& data, const std::vector<double>& omega) {
  const std::size_t m = data.n_obs(), n = data.n_inc();
  Eigen::MatrixXcd b(static_cast<Eigen::Index>(3 * m), static_cast<Eigen::Index>(2 * n));
  for (std::size_t j = 0; j < n; ++j) {
    const TangentFrame fr = tangential_basis(data.incidence->point(j));
    const double sw = std::sqrt(data.incidence->weight(j));
    for (std::size_t i = 0; i < m; ++i) {
      const double so = std::sqrt(omega[i]);
      const CVec3 c1 = data.mask.apply(data.entry(i, j) * fr.e1.cast<cdouble>()) * (so * sw);
      const CVec3 c2 = data.mask.apply(data.entry(i, j) * fr.e2.cast<cdouble>()) * (so * sw);
      b.block<3, 1>(static_cast<Eigen::Index>(3 * i), static_cast<Eigen::Index>(2 * j)) = c1;
      b.block<3, 1>(static_cast<Eigen::Index>(3 * i), static_cast<Eigen::Index>(2 * j + 1)) = c2;
    }
  }
  return b;
}

double spectral_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

double operator_norm(const FarFieldData& data, const WaveContext& ctx) {
  check_wavenumber(data, ctx);
  return spectral_norm(weighted_full_matrix(data, outer_weights_for(data)));
}

double probe_norm_squared(const FarFieldData& data, const WaveContext& ctx) {
  double s = 0.0;
  for (std::size_t j = 0; j < data.n_inc(); ++j)
    s += data.incidence->weight(j) * probe_polarization(data.incidence->point(j), ctx).squaredNorm();
  return s;
}

bool StabilityReport::all_hold() const {
  return std::all_of(rows.begin(), rows.end(), [](const StabilityRow& r) { return r.holds; });
}

StabilityReport stability_gap(const FarFieldData& data, const std::vector<double>& deltas,
                              const std::vector<std::uint64_t>& seeds, const SamplingGrid& grid,
                              const WaveContext& ctx, unsigned workers) {
  check_wavenumber(data, ctx);
  const auto omega = outer_weights_for(data);
  const Eigen::MatrixXcd b = weighted_full_matrix(data, omega);
  StabilityReport rep;
  rep.operator_norm = spectral_norm(b);
  rep.probe_norm_squared = probe_norm_squared(data, ctx);
  const IndicatorField clean = scan_raw(data, grid, ctx, workers);
  for (double delta : deltas)
    for (std::uint64_t seed : seeds) {
      const FarFieldData noisy = add_noise(data, delta, seed);
      const IndicatorField pert = scan_raw(noisy, grid, ctx, workers);
      StabilityRow row;
      row.delta = delta;
      row.seed = seed;
      for (std::size_t s = 0; s < grid.size(); ++s)
        row.max_gap = std::max(row.max_gap, std::abs(clean.values[s] - pert.values[s]));
      row.bound = (delta * delta + 2.0 * delta) * rep.operator_norm * rep.operator_norm * rep.probe_norm_squared;
      row.margin = row.bound - row.max_gap;
      row.holds = row.max_gap <= row.bound;
      row.perturbation_ratio =
          rep.operator_norm > 0.0 ? spectral_norm(b - weighted_full_matrix(noisy, omega)) / rep.operator_norm : 0.0;
      rep.rows.push_back(row);
    }
  return rep;
}

DecayFit decay_profile(const FarFieldData& data, const std::vector<Vec3>& ray, const std::vector<double>& distances,
                       const WaveContext& ctx) {
  if (ray.size() < 8) throw std::invalid_argument("decay_profile: need at least 8 ray points");
  if (distances.size() != ray.size()) throw std::invalid_argument("decay_profile: one distance per ray point");
  const MosmEvaluator eval(data, ctx);
  DecayFit fit;
  fit.distances = distances;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t r = 0; r < ray.size(); ++r) {
    if (!(distances[r] > 0.0)) throw std::invalid_argument("decay_profile: distances must be positive");
    const double v = eval.value(ray[r]);
    if (!(v > 0.0)) throw std::invalid_argument("decay_profile: indicator vanishes on the ray");
    fit.values.push_back(v);
    const double x = std::log(distances[r]), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(ray.size());
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw std::invalid_argument("decay_profile: distances must not all coincide");
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.non_physical = fit.slope > -0.5;
  return fit;
}

double jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::size_t> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  const double uni = static_cast<double>(a.size() + b.size() - inter.size());
  return static_cast<double>(inter.size()) / uni;
}

int count_components(const SamplingGrid& grid, const std::vector<std::size_t>& indices) {
  std::vector<char> in(grid.size(), 0), seen(grid.size(), 0);
  for (std::size_t idx : indices) in.at(idx) = 1;
  int count = 0;
  for (std::size_t start : indices) {
    if (seen[start]) continue;
    ++count;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const auto c = grid.coords(q.front());
      q.pop();
      for (int a = 0; a < 3; ++a)
        for (int s : {-1, 1}) {
          auto nb = c;
          nb[static_cast<std::size_t>(a)] += s;
          if (nb[static_cast<std::size_t>(a)] < 0 || nb[static_cast<std::size_t>(a)] >= grid.n[static_cast<std::size_t>(a)])
            continue;
          const std::size_t ni = grid.index(nb[0], nb[1], nb[2]);
          if (in[ni] && !seen[ni]) {
            seen[ni] = 1;
            q.push(ni);
          }
        }
    }
  }
  return count;
}

int count_components(const Slice2D& s, double isovalue) {
  const std::size_t nu = s.u.size(), nv = s.v.size();
  std::vector<char> seen(nu * nv, 0);
  int count = 0;
  for (std::size_t start = 0; start < nu * nv; ++start) {
    if (seen[start] || s.values[start] < isovalue) continue;
    ++count;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const std::size_t cur = q.front();
      q.pop();
      const std::size_t r = cur / nu, c = cur % nu;
      const std::size_t nbs[4][2] = {{r, c - 1}, {r, c + 1}, {r - 1, c}, {r + 1, c}};
      for (const auto& nb : nbs) {
        if (nb[0] >= nv || nb[1] >= nu) continue;  // unsigned wrap covers −1
        const std::size_t ni = nb[0] * nu + nb[1];
        if (!seen[ni] && s.values[ni] >= isovalue) {
          seen[ni] = 1;
          q.push(ni);
        }
      }
    }
  }
  return count;
}

}  // namespace mosm
