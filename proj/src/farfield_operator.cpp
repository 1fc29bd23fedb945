#include "mosm/farfield_operator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mosm/errors.hpp"
#include "mosm/format.hpp"
#include "mosm/parallel.hpp"

namespace mosm {

DiscreteFarFieldOperator::DiscreteFarFieldOperator(const FarFieldData& data)
    : observation_(data.observation), incidence_(data.incidence) {
  data.validate();
  const std::size_t m = data.n_obs(), n = data.n_inc();
  matrix_.resize(static_cast<Eigen::Index>(2 * m), static_cast<Eigen::Index>(2 * n));
  std::vector<TangentFrame> fo(m), fi(n);
  for (std::size_t i = 0; i < m; ++i) fo[i] = tangential_basis(observation_->point(i));
  for (std::size_t j = 0; j < n; ++j) fi[j] = tangential_basis(incidence_->point(j));
  for (std::size_t j = 0; j < n; ++j) {
    const double w = incidence_->weight(j);
    for (std::size_t i = 0; i < m; ++i) {
      const CMat3 u = data.entry(i, j);
      const Vec3* ea[2] = {&fo[i].e1, &fo[i].e2};
      const Vec3* eb[2] = {&fi[j].e1, &fi[j].e2};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const CVec3 col = data.mask.apply(u * eb[b]->cast<cdouble>());
          matrix_(static_cast<Eigen::Index>(2 * i + a), static_cast<Eigen::Index>(2 * j + b)) =
              ea[a]->cast<cdouble>().dot(col) * w;
        }
    }
  }
  spectral_ready_ = data.mask.is_all() && observation_->topology() == Topology::FullSphere &&
                    incidence_->topology() == Topology::FullSphere && *observation_ == *incidence_;
}

Eigen::VectorXcd DiscreteFarFieldOperator::coordinates(const TangentialField& g) const {
  if (g.size() != incidence_->size()) throw std::invalid_argument("coordinates: field size mismatch");
  Eigen::VectorXcd c(static_cast<Eigen::Index>(2 * g.size()));
  for (std::size_t j = 0; j < g.size(); ++j) {
    const TangentFrame fr = tangential_basis(incidence_->point(j));
    c(static_cast<Eigen::Index>(2 * j)) = fr.e1.cast<cdouble>().dot(g[j]);
    c(static_cast<Eigen::Index>(2 * j + 1)) = fr.e2.cast<cdouble>().dot(g[j]);
  }
  return c;
}

std::vector<CVec3> DiscreteFarFieldOperator::apply(const TangentialField& g) const {
  const Eigen::VectorXcd out = matrix_ * coordinates(g);
  std::vector<CVec3> res(observation_->size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    const TangentFrame fr = tangential_basis(observation_->point(i));
    res[i] = out(static_cast<Eigen::Index>(2 * i)) * fr.e1.cast<cdouble>() +
             out(static_cast<Eigen::Index>(2 * i + 1)) * fr.e2.cast<cdouble>();
  }
  return res;
}

Eigen::MatrixXcd DiscreteFarFieldOperator::symmetrized() const {
  if (!spectral_ready_)
    throw std::invalid_argument("spectral diagnostics need square full-sphere unmasked data");
  Eigen::MatrixXcd s = matrix_;
  for (Eigen::Index r = 0; r < s.rows(); ++r) s.row(r) *= std::sqrt(observation_->weight(static_cast<std::size_t>(r / 2)));
  for (Eigen::Index c = 0; c < s.cols(); ++c) s.col(c) /= std::sqrt(incidence_->weight(static_cast<std::size_t>(c / 2)));
  return s;
}

DiscreteFarFieldOperator assemble_operator(const FarFieldData& data) { return DiscreteFarFieldOperator(data); }

Eigen::MatrixXcd imaginary_part(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("imaginary_part: matrix is not square");
  Eigen::MatrixXcd r(a.rows(), a.cols());
  const cdouble minus_half_i(0.0, -0.5);  // 1/(2i)
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index rr = 0; rr < a.rows(); ++rr) r(rr, c) = (a(rr, c) - std::conj(a(c, rr))) * minus_half_i;
  return r;
}

Eigen::MatrixXcd imaginary_part(const DiscreteFarFieldOperator& op) { return imaginary_part(op.symmetrized()); }

CoercivityReport coercivity_report(const Eigen::MatrixXcd& im_f) {
  if (im_f.rows() != im_f.cols()) throw std::invalid_argument("coercivity_report: matrix is not square");
  CoercivityReport rep;
  if (im_f.size() == 0) return rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(im_f);
  if (es.info() != Eigen::Success) throw std::runtime_error("coercivity_report: eigensolver failed");
  rep.spectrum = es.eigenvalues();
  rep.eigenvectors = es.eigenvectors();
  rep.lambda_min = rep.spectrum(0);
  rep.lambda_max = rep.spectrum(rep.spectrum.size() - 1);
  rep.relative_min = rep.lambda_max > 0.0 ? rep.lambda_min / rep.lambda_max : 0.0;
  return rep;
}

void write_spectrum_csv(std::ostream& out, const CoercivityReport& report) {
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < report.spectrum.size(); ++i) out << i << ',' << fmt_real(report.spectrum(i)) << '\n';
}

double FmCutoff::ratio(const CoercivityReport& report) const {
  if (mode == Mode::Fixed) return value;
  const double floor = report.lambda_max > 0.0 ? std::abs(report.lambda_min) / report.lambda_max : 0.0;
  return std::max(value, floor);
}

IndicatorField fm_indicator(const CoercivityReport& report, const DiscreteFarFieldOperator& op,
                            const SamplingGrid& grid, const Vec3& p, double k, FmCutoff cutoff, unsigned workers) {
  if (!op.spectral_ready()) throw std::invalid_argument("fm_indicator: needs square full-sphere unmasked data");
  if (!(p.norm() > 0.0)) throw std::invalid_argument("fm_indicator: polarization anchor p must be nonzero");
  if (!(report.lambda_max > 0.0)) throw DegenerateSpectrum("fm_indicator: Im F has no positive eigenvalue");
  const double threshold = cutoff.ratio(report) * report.lambda_max;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < report.spectrum.size(); ++j)
    if (report.spectrum(j) > threshold) keep.push_back(j);
  if (keep.empty()) throw DegenerateSpectrum("fm_indicator: every eigenvalue is below the cutoff");

  const UnitDirectionSet& dirs = op.incidence();
  const std::size_t n = dirs.size();
  // φ_y in weighted orthonormal coordinates: √w_j (e_a(d_j)·(d×p)×d) e^{−ik d·y}.
  std::vector<std::array<double, 2>> amp(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec3& d = dirs.point(j);
    const Vec3 q = projected_polarization(d, p);
    const TangentFrame fr = tangential_basis(d);
    const double sw = std::sqrt(dirs.weight(j));
    amp[j] = {sw * fr.e1.dot(q), sw * fr.e2.dot(q)};
  }
  Eigen::MatrixXcd psi(report.eigenvectors.rows(), static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd inv_lambda(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    psi.col(static_cast<Eigen::Index>(c)) = report.eigenvectors.col(keep[c]);
    inv_lambda(static_cast<Eigen::Index>(c)) = 1.0 / report.spectrum(keep[c]);
  }
  const Eigen::MatrixXcd psi_h = psi.adjoint();

  IndicatorField field;
  field.grid = grid;
  field.values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), workers, [&](std::size_t s) {
    const Vec3 y = grid.point(s);
    Eigen::VectorXcd phi(static_cast<Eigen::Index>(2 * n));
    for (std::size_t j = 0; j < n; ++j) {
      const cdouble ph = std::exp(-kI * (k * dirs.point(j).dot(y)));
      phi(static_cast<Eigen::Index>(2 * j)) = amp[j][0] * ph;
      phi(static_cast<Eigen::Index>(2 * j + 1)) = amp[j][1] * ph;
    }
    const Eigen::VectorXcd proj = psi_h * phi;
    const double picard = (proj.cwiseAbs2().array() * inv_lambda.array()).sum();
    field.values[s] = picard > 0.0 ? 1.0 / picard : 0.0;
  });
  field.normalize();
  return field;
}

IndicatorField osm_indicator(const FarFieldData& data, const SamplingGrid& grid, const Vec3& p, unsigned workers) {
  data.validate();
  if (!(p.norm() > 0.0)) throw std::invalid_argument("osm_indicator: polarization anchor p must be nonzero");
  const std::size_t m = data.n_obs(), n = data.n_inc();
  const double k = data.k;
  // c_ij = w_i q(x̂_i)·(mask ⊙ U_ij q(d_j)).
  std::vector<cdouble> c(m * n);
  for (std::size_t j = 0; j < n; ++j) {
    const CVec3 qd = projected_polarization(data.incidence->point(j), p).cast<cdouble>();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3& x = data.observation->point(i);
      const CVec3 qx = projected_polarization(x, p).cast<cdouble>();
      c[j * m + i] = data.observation->weight(i) * qx.dot(data.mask.apply(data.entry(i, j) * qd));
    }
  }
  IndicatorField field;
  field.grid = grid;
  field.values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), workers, [&](std::size_t s) {
    const Vec3 y = grid.point(s);
    std::vector<cdouble> ph(m);
    for (std::size_t i = 0; i < m; ++i) ph[i] = std::exp(kI * (k * data.observation->point(i).dot(y)));
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cdouble acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += c[j * m + i] * ph[i];
      total += data.incidence->weight(j) * std::norm(acc);
    }
    field.values[s] = total;
  });
  field.normalize();
  return field;
}

}  // namespace mosm
