#include "mosm/volume_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace mosm {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

cdouble* alloc_complex(std::size_t n) {
  auto* p = static_cast<cdouble*>(fftw_malloc(sizeof(cdouble) * n));
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

bool smooth_size(int n) {
  for (int f : {2, 3, 5, 7})
    while (n % f == 0) n /= f;
  return n == 1;
}

int fft_size_at_least(int n) {
  if (n % 2 != 0) ++n;
  while (!smooth_size(n)) n += 2;
  return n;
}

// Signed frequency index for bin q of an n-point DFT; −n/2 at Nyquist.
int signed_bin(int q, int n) { return q < (n + 1) / 2 ? q : q - n; }

}  // namespace

cdouble truncated_green_transform(double s, double k, double L) {
  if (k == 0.0) {  // static kernel 1/(4π|x|)
    const double t = s * L;
    return t < 1e-4 ? L * L * (0.5 - t * t / 24.0) : (1.0 - std::cos(t)) / (s * s);
  }
  const cdouble eikl = std::exp(kI * (k * L));
  if (std::abs(s - k) < 1e-8 * k) {
    const cdouble two_ik = 2.0 * kI * k;
    return ((eikl * eikl - 1.0) / two_ik - L) / two_ik;
  }
  const double sinc_term = s * L < 1e-12 ? L : std::sin(s * L) / s;
  return (1.0 - eikl * (std::cos(s * L) - kI * k * sinc_term)) / (s * s - k * k);
}

// Full transforms plus pruned ones that skip the rows known to be zero on
// input (forward) or not needed on output (backward).
struct VolumeOperator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::array<fftw_plan, 3> fwd_pass{};
  std::array<fftw_plan, 3> bwd_pass{};
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {forward, backward})
      if (p) fftw_destroy_plan(p);
    for (auto& arr : {fwd_pass, bwd_pass})
      for (fftw_plan p : arr)
        if (p) fftw_destroy_plan(p);
  }
};

VolumeOperator::VolumeOperator(const VolumeGrid& grid, double k) : VolumeOperator(grid, k, Options{}) {}

VolumeOperator::VolumeOperator(const VolumeGrid& grid, double k, Options options)
    : grid_(grid), k_(k), plans_(std::make_unique<Plans>()) {
  grid_.validate();
  if (!(k > 0.0)) throw std::invalid_argument("VolumeOperator: k must be positive");
  const double h = grid_.h;
  const double diag = std::sqrt(static_cast<double>(grid_.n[0]) * grid_.n[0] +
                                static_cast<double>(grid_.n[1]) * grid_.n[1] +
                                static_cast<double>(grid_.n[2]) * grid_.n[2]);
  L_ = options.truncation_factor * h * diag;

  for (int a = 0; a < 3; ++a) pad_[a] = 2 * grid_.n[a];
  padded_total_ = static_cast<std::size_t>(pad_[0]) * pad_[1] * pad_[2];

  cdouble* scratch = alloc_complex(padded_total_);
  {
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_3d(pad_[2], pad_[1], pad_[0], as_fftw(scratch), as_fftw(scratch),
                                       FFTW_FORWARD, FFTW_MEASURE);
    plans_->backward = fftw_plan_dft_3d(pad_[2], pad_[1], pad_[0], as_fftw(scratch), as_fftw(scratch),
                                        FFTW_BACKWARD, FFTW_MEASURE);
    const int p0 = pad_[0], p1 = pad_[1], p2 = pad_[2];
    const int n1 = grid_.n[1], n2 = grid_.n[2];
    // Pass along x over rows j < n1, l < n2; along y over slabs l < n2; along z everywhere.
    const fftw_iodim along[3] = {{p0, 1, 1}, {p1, p0, p0}, {p2, p0 * p1, p0 * p1}};
    const fftw_iodim rows_x[2] = {{n1, p0, p0}, {n2, p0 * p1, p0 * p1}};
    const fftw_iodim rows_y[2] = {{p0, 1, 1}, {n2, p0 * p1, p0 * p1}};
    const fftw_iodim rows_z[1] = {{p0 * p1, 1, 1}};
    const fftw_iodim* rows[3] = {rows_x, rows_y, rows_z};
    const int nrows[3] = {2, 2, 1};
    for (int a = 0; a < 3; ++a) {
      for (int sign : {FFTW_FORWARD, FFTW_BACKWARD}) {
        fftw_plan p = fftw_plan_guru_dft(1, &along[a], nrows[a], rows[a], as_fftw(scratch), as_fftw(scratch), sign,
                                         FFTW_MEASURE);
        if (p == nullptr) throw std::runtime_error("VolumeOperator: FFTW planning failed");
        (sign == FFTW_FORWARD ? plans_->fwd_pass : plans_->bwd_pass)[static_cast<std::size_t>(a)] = p;
      }
    }
  }

  // Oversampled grid: periodic images of the truncated kernel stay clear of
  // every offset the Toeplitz matrix needs.
  std::array<int, 3> P{};
  for (int a = 0; a < 3; ++a)
    P[a] = fft_size_at_least(grid_.n[a] - 1 + static_cast<int>(std::ceil(L_ / h)) + options.margin);
  const std::size_t ptotal = static_cast<std::size_t>(P[0]) * P[1] * P[2];

  std::vector<cdouble> ghat(ptotal);
  std::vector<std::array<double, 3>> xi(ptotal);
  std::vector<std::array<bool, 3>> nyquist(ptotal);
  for (int l = 0; l < P[2]; ++l)
    for (int j = 0; j < P[1]; ++j)
      for (int i = 0; i < P[0]; ++i) {
        const std::size_t q = static_cast<std::size_t>(i) + static_cast<std::size_t>(P[0]) * (j + static_cast<std::size_t>(P[1]) * l);
        const int bins[3] = {i, j, l};
        double s2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          const int b = signed_bin(bins[a], P[a]);
          xi[q][a] = 2.0 * kPi * b / (P[a] * h);
          nyquist[q][a] = 2 * b == -P[a];
          s2 += xi[q][a] * xi[q][a];
        }
        ghat[q] = truncated_green_transform(std::sqrt(s2), k, L_);
      }

  cdouble* big = alloc_complex(ptotal);
  fftw_plan big_backward;
  {
    std::lock_guard lock(planner_mutex());
    big_backward = fftw_plan_dft_3d(P[2], P[1], P[0], as_fftw(big), as_fftw(big), FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  const double k2 = k * k;
  static constexpr int pair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  spectra_.resize(kComponents);
  for (int c = 0; c < kComponents; ++c) {
    for (std::size_t q = 0; q < ptotal; ++q) {
      cdouble factor = 1.0;
      if (c >= 1 && c <= 6) {
        const int a = pair[c - 1][0], b = pair[c - 1][1];
        if (a != b && (nyquist[q][a] || nyquist[q][b])) {
          factor = 0.0;
        } else {
          factor = (a == b ? k2 : 0.0) - xi[q][a] * xi[q][b];
        }
      } else if (c >= 7) {
        const int a = c - 7;
        factor = nyquist[q][a] ? cdouble(0.0) : kI * xi[q][a];
      }
      big[q] = factor * ghat[q];
    }
    fftw_execute_dft(big_backward, as_fftw(big), as_fftw(big));

    std::fill(scratch, scratch + padded_total_, cdouble(0.0));
    const double pscale = 1.0 / static_cast<double>(ptotal);
    for (int ml = -(grid_.n[2] - 1); ml <= grid_.n[2] - 1; ++ml)
      for (int mj = -(grid_.n[1] - 1); mj <= grid_.n[1] - 1; ++mj)
        for (int mi = -(grid_.n[0] - 1); mi <= grid_.n[0] - 1; ++mi) {
          const std::size_t src = static_cast<std::size_t>((mi + P[0]) % P[0]) +
                                  static_cast<std::size_t>(P[0]) *
                                      (static_cast<std::size_t>((mj + P[1]) % P[1]) +
                                       static_cast<std::size_t>(P[1]) * static_cast<std::size_t>((ml + P[2]) % P[2]));
          scratch[padded_index((mi + pad_[0]) % pad_[0], (mj + pad_[1]) % pad_[1], (ml + pad_[2]) % pad_[2])] =
              big[src] * pscale;
        }
    forward(scratch);
    const double cscale = 1.0 / static_cast<double>(padded_total_);
    spectra_[c].resize(padded_total_);
    for (std::size_t q = 0; q < padded_total_; ++q) spectra_[c][q] = scratch[q] * cscale;
  }

  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(big_backward);
  }
  fftw_free(big);
  fftw_free(scratch);
}

VolumeOperator::~VolumeOperator() = default;

std::size_t VolumeOperator::padded_index(int i, int j, int l) const {
  return static_cast<std::size_t>(i) +
         static_cast<std::size_t>(pad_[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(pad_[1]) * l);
}

void VolumeOperator::forward(cdouble* data) const { fftw_execute_dft(plans_->forward, as_fftw(data), as_fftw(data)); }

void VolumeOperator::backward(cdouble* data) const {
  fftw_execute_dft(plans_->backward, as_fftw(data), as_fftw(data));
}

VolumeOperator::Workspace::Workspace(const VolumeOperator& op) {
  for (auto& b : buf_) b = alloc_complex(op.padded_size());
}

VolumeOperator::Workspace::~Workspace() {
  for (auto* b : buf_)
    if (b) fftw_free(b);
}

void VolumeOperator::forward_pruned(cdouble* data) const {
  for (int a = 0; a < 3; ++a) fftw_execute_dft(plans_->fwd_pass[static_cast<std::size_t>(a)], as_fftw(data), as_fftw(data));
}

void VolumeOperator::backward_pruned(cdouble* data) const {
  for (int a = 2; a >= 0; --a) fftw_execute_dft(plans_->bwd_pass[static_cast<std::size_t>(a)], as_fftw(data), as_fftw(data));
}

void VolumeOperator::apply(const CVec3* rho1, const CVec3* rho2, CVec3* out1, CVec3* out2, Workspace& ws) const {
  auto& b = ws.buf_;
  for (auto* p : b) std::memset(static_cast<void*>(p), 0, sizeof(cdouble) * padded_total_);
  const int n0 = grid_.n[0], n1 = grid_.n[1], n2 = grid_.n[2];
  std::size_t idx = 0;
  for (int l = 0; l < n2; ++l)
    for (int j = 0; j < n1; ++j) {
      const std::size_t row = padded_index(0, j, l);
      for (int i = 0; i < n0; ++i, ++idx) {
        for (int a = 0; a < 3; ++a) {
          b[a][row + i] = rho1[idx][a];
          b[3 + a][row + i] = rho2[idx][a];
        }
      }
    }
  for (auto* p : b) forward_pruned(p);

  const double k2 = k_ * k_;
  const auto& s = spectra_;
  for (std::size_t q = 0; q < padded_total_; ++q) {
    const cdouble dxx = s[1][q], dyy = s[2][q], dzz = s[3][q], dxy = s[4][q], dxz = s[5][q], dyz = s[6][q];
    const cdouble gx = s[7][q], gy = s[8][q], gz = s[9][q];
    const cdouble r1x = b[0][q], r1y = b[1][q], r1z = b[2][q];
    const cdouble r2x = b[3][q], r2y = b[4][q], r2z = b[5][q];
    b[0][q] = dxx * r1x + dxy * r1y + dxz * r1z + (gy * r2z - gz * r2y);
    b[1][q] = dxy * r1x + dyy * r1y + dyz * r1z + (gz * r2x - gx * r2z);
    b[2][q] = dxz * r1x + dyz * r1y + dzz * r1z + (gx * r2y - gy * r2x);
    b[3][q] = dxx * r2x + dxy * r2y + dxz * r2z + k2 * (gy * r1z - gz * r1y);
    b[4][q] = dxy * r2x + dyy * r2y + dyz * r2z + k2 * (gz * r1x - gx * r1z);
    b[5][q] = dxz * r2x + dyz * r2y + dzz * r2z + k2 * (gx * r1y - gy * r1x);
  }
  for (auto* p : b) backward_pruned(p);

  idx = 0;
  for (int l = 0; l < n2; ++l)
    for (int j = 0; j < n1; ++j) {
      const std::size_t row = padded_index(0, j, l);
      for (int i = 0; i < n0; ++i, ++idx) {
        const CVec3 r2 = rho2[idx];
        for (int a = 0; a < 3; ++a) {
          out1[idx][a] = b[a][row + i];
          out2[idx][a] = b[3 + a][row + i] + r2[a];
        }
      }
    }
}

void VolumeOperator::apply_scalar(const cdouble* rho, cdouble* out, Workspace& ws) const {
  cdouble* b = ws.buf_[0];
  std::memset(static_cast<void*>(b), 0, sizeof(cdouble) * padded_total_);
  const std::size_t n = grid_.size();
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto c = grid_.coords(idx);
    b[padded_index(c[0], c[1], c[2])] = rho[idx];
  }
  forward(b);
  for (std::size_t q = 0; q < padded_total_; ++q) b[q] *= spectra_[0][q];
  backward(b);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto c = grid_.coords(idx);
    out[idx] = b[padded_index(c[0], c[1], c[2])];
  }
}

cdouble VolumeOperator::kernel_sample(int component, const std::array<int, 3>& offset) const {
  if (component < 0 || component >= kComponents) throw std::out_of_range("kernel_sample: bad component");
  for (int a = 0; a < 3; ++a)
    if (std::abs(offset[a]) >= grid_.n[a]) throw std::out_of_range("kernel_sample: offset outside Toeplitz range");
  Workspace ws(*this);
  cdouble* b = ws.buf_[0];
  std::copy(spectra_[component].begin(), spectra_[component].end(), b);
  backward(b);
  return b[padded_index((offset[0] + pad_[0]) % pad_[0], (offset[1] + pad_[1]) % pad_[1],
                        (offset[2] + pad_[2]) % pad_[2])];
}

}  // namespace mosm
