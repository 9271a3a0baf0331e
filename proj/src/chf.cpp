#include "chfmatch/chf.hpp"

#include <cmath>

namespace chfmatch {

namespace {

inline double dot_row(const double* row, const double* t, int p) {
  double s = 0.0;
  for (int i = 0; i < p; ++i) s += row[i] * t[i];
  return s;
}

std::complex<double> chf_at(const BlockMatrix& data, const double* t) {
  const long n = data.rows();
  const int p = static_cast<int>(data.cols());
  double re = 0.0, im = 0.0;
  const double* row = data.data();
  for (long j = 0; j < n; ++j, row += p) {
    const double s = dot_row(row, t, p);
    re += std::cos(s);
    im += std::sin(s);
  }
  return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

struct CvSums {
  double c = 0, s = 0;                        // cos, sin
  double h1 = 0, h2 = 0;                      // controls
  double h11 = 0, h22 = 0, h12 = 0;           // control second moments
  double h1c = 0, h1s = 0, h2c = 0, h2s = 0;  // control x chf cross terms
};

CvChfResult cv_at(const BlockMatrix& data, const double* t, double m1, double m2,
                  bool t_is_zero) {
  const long H = data.rows();
  const int p = static_cast<int>(data.cols());
  CvSums a;
  const double* row = data.data();
  for (long j = 0; j < H; ++j, row += p) {
    const double sdot = dot_row(row, t, p);
    const double c = std::cos(sdot);
    const double s = std::sin(sdot);
    const double h1 = sdot - m1;
    const double h2 = sdot * sdot - m2;
    a.c += c;
    a.s += s;
    a.h1 += h1;
    a.h2 += h2;
    a.h11 += h1 * h1;
    a.h22 += h2 * h2;
    a.h12 += h1 * h2;
    a.h1c += h1 * c;
    a.h1s += h1 * s;
    a.h2c += h2 * c;
    a.h2s += h2 * s;
  }
  const double inv = 1.0 / static_cast<double>(H);
  // same arithmetic as the plain chf so the fallback is bit-identical to it
  const std::complex<double> mc(a.c / static_cast<double>(H),
                                a.s / static_cast<double>(H));

  CvChfResult out;
  out.diagnostics.control_mean = {a.h1 * inv, a.h2 * inv};

  // Centered Gram matrix G = P_H(h h') - P_H(h) P_H(h)'.
  const double g11 = a.h11 * inv - (a.h1 * inv) * (a.h1 * inv);
  const double g22 = a.h22 * inv - (a.h2 * inv) * (a.h2 * inv);
  const double g12 = a.h12 * inv - (a.h1 * inv) * (a.h2 * inv);
  const double det = g11 * g22 - g12 * g12;
  const double trace = g11 + g22;

  const double disc = std::sqrt(std::max(trace * trace - 4.0 * det, 0.0));
  const double lmin = 0.5 * (trace - disc);
  out.diagnostics.gram_condition =
      lmin > 0.0 ? 0.5 * (trace + disc) / lmin
                 : std::numeric_limits<double>::infinity();

  if (t_is_zero || !(det > 1e-12 * trace * trace)) {
    out.value = mc;
    out.diagnostics.fallback_used = true;
    return out;
  }

  // Centered right-hand sides, real and imaginary parts separately.
  const double r1re = a.h1c * inv - (a.h1 * inv) * (a.c * inv);
  const double r2re = a.h2c * inv - (a.h2 * inv) * (a.c * inv);
  const double r1im = a.h1s * inv - (a.h1 * inv) * (a.s * inv);
  const double r2im = a.h2s * inv - (a.h2 * inv) * (a.s * inv);

  const double inv_det = 1.0 / det;
  const double b1re = (g22 * r1re - g12 * r2re) * inv_det;
  const double b2re = (g11 * r2re - g12 * r1re) * inv_det;
  const double b1im = (g22 * r1im - g12 * r2im) * inv_det;
  const double b2im = (g11 * r2im - g12 * r1im) * inv_det;

  out.diagnostics.beta_hat[0] = {b1re, b1im};
  out.diagnostics.beta_hat[1] = {b2re, b2im};

  const double ph1 = a.h1 * inv;
  const double ph2 = a.h2 * inv;
  out.value = {mc.real() - (b1re * ph1 + b2re * ph2),
               mc.imag() - (b1im * ph1 + b2im * ph2)};
  return out;
}

}  // namespace

std::complex<double> empirical_chf(const BlockSet& blocks,
                                   const Eigen::Ref<const Vector>& t) {
  if (blocks.count() == 0) throw std::invalid_argument("empirical_chf: empty block set");
  if (t.size() != blocks.p()) throw std::invalid_argument("empirical_chf: dimension mismatch");
  Vector tc = t;
  return chf_at(blocks.data, tc.data());
}

std::complex<double> mc_chf(const BlockSet& sim_blocks,
                            const Eigen::Ref<const Vector>& t) {
  return empirical_chf(sim_blocks, t);
}

Eigen::Vector2d control_values(const Eigen::Ref<const Vector>& t,
                               const Eigen::Ref<const Vector>& block_row,
                               const BlockMoments& moments) {
  if (t.size() != block_row.size() || t.size() != moments.mean.size()) {
    throw std::invalid_argument("control_values: dimension mismatch");
  }
  const double s = t.dot(block_row);
  const double m1 = t.dot(moments.mean);
  const double m2 = m1 * m1 + t.dot(moments.cov * t);
  return {s - m1, s * s - m2};
}

CvChfResult cv_chf(const BlockSet& sim_blocks, const Eigen::Ref<const Vector>& t,
                   const BlockMoments& moments) {
  if (sim_blocks.count() < 3) {
    throw std::invalid_argument("cv_chf: need at least 3 simulated blocks");
  }
  if (t.size() != sim_blocks.p() || t.size() != moments.mean.size()) {
    throw std::invalid_argument("cv_chf: dimension mismatch");
  }
  Vector tc = t;
  const double m1 = tc.dot(moments.mean);
  const double m2 = m1 * m1 + tc.dot(moments.cov * tc);
  return cv_at(sim_blocks.data, tc.data(), m1, m2, tc.isZero(0.0));
}

std::vector<std::complex<double>> chf_batch(const BlockSet& blocks,
                                            const BlockMatrix& ts) {
  if (blocks.count() == 0) throw std::invalid_argument("chf_batch: empty block set");
  if (ts.cols() != blocks.p()) throw std::invalid_argument("chf_batch: dimension mismatch");
  std::vector<std::complex<double>> out(ts.rows());
  for (long m = 0; m < ts.rows(); ++m) {
    out[m] = chf_at(blocks.data, ts.row(m).data());
  }
  return out;
}

std::vector<CvChfResult> cv_chf_batch(const BlockSet& sim_blocks,
                                      const BlockMatrix& ts,
                                      const BlockMoments& moments) {
  if (sim_blocks.count() < 3) {
    throw std::invalid_argument("cv_chf_batch: need at least 3 simulated blocks");
  }
  if (ts.cols() != sim_blocks.p()) {
    throw std::invalid_argument("cv_chf_batch: dimension mismatch");
  }
  std::vector<CvChfResult> out(ts.rows());
  for (long m = 0; m < ts.rows(); ++m) {
    const double* t = ts.row(m).data();
    const int p = static_cast<int>(ts.cols());
    double m1 = 0.0;
    for (int i = 0; i < p; ++i) m1 += t[i] * moments.mean[i];
    double quad = 0.0;
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) quad += t[i] * moments.cov(i, j) * t[j];
    }
    bool zero = true;
    for (int i = 0; i < p; ++i) zero = zero && t[i] == 0.0;
    out[m] = cv_at(sim_blocks.data, t, m1, m1 * m1 + quad, zero);
  }
  return out;
}

}  // namespace chfmatch
