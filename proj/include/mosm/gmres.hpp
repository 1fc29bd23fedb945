#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace mosm {

struct GmresOptions {
  int restart = 50;
  double tol = 1e-6;   // on ‖b − A x‖ / ‖b‖
  int max_iter = 500;  // total Arnoldi steps over all cycles
};

struct GmresResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations.
/// `apply(in, out)` computes out = A in. x holds the initial guess on entry.
template <typename Apply>
GmresResult gmres(Apply&& apply, const Eigen::VectorXcd& b, Eigen::VectorXcd& x, const GmresOptions& opt) {
  using Vec = Eigen::VectorXcd;
  using cd = std::complex<double>;
  GmresResult result;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    result.converged = true;
    return result;
  }
  const int m = std::max(1, opt.restart);
  const Eigen::Index n = b.size();
  Vec r(n), w(n);
  std::vector<Vec> V(static_cast<std::size_t>(m) + 1, Vec(n));
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  std::vector<cd> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
  Vec g(m + 1);

  apply(x, w);
  r = b - w;
  double rnorm = r.norm();
  result.relative_residual = rnorm / bnorm;
  while (result.relative_residual > opt.tol && result.iterations < opt.max_iter) {
    V[0] = r / rnorm;
    g.setZero();
    g(0) = rnorm;
    H.setZero();
    int j = 0;
    for (; j < m && result.iterations < opt.max_iter; ++j) {
      apply(V[static_cast<std::size_t>(j)], w);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V[static_cast<std::size_t>(i)].dot(w);  // conjugates the first argument
        w -= H(i, j) * V[static_cast<std::size_t>(i)];
      }
      const double hn = w.norm();
      H(j + 1, j) = hn;
      if (hn > 0.0) V[static_cast<std::size_t>(j) + 1] = w / hn;
      for (int i = 0; i < j; ++i) {
        const cd t = std::conj(cs[i]) * H(i, j) + std::conj(sn[i]) * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double a = std::abs(H(j, j));
      const double denom = std::hypot(a, hn);
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else if (a == 0.0) {
        cs[j] = 0.0;
        sn[j] = 1.0;
      } else {
        cs[j] = H(j, j) / denom;
        sn[j] = hn / denom;
      }
      H(j, j) = std::conj(cs[j]) * H(j, j) + std::conj(sn[j]) * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = std::conj(cs[j]) * g(j);
      ++result.iterations;
      if (std::abs(g(j + 1)) / bnorm <= opt.tol || hn == 0.0) {
        ++j;
        break;
      }
    }
    Vec y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) x += y(i) * V[static_cast<std::size_t>(i)];
    apply(x, w);
    r = b - w;
    rnorm = r.norm();
    result.relative_residual = rnorm / bnorm;
  }
  result.converged = result.relative_residual <= opt.tol;
  return result;
}

}  // namespace mosm
