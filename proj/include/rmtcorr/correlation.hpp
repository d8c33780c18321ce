#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtcorr/returns.hpp"

namespace rmtcorr {

/// Equal-time cross-correlation matrix, symmetric with an exact unit diagonal.
struct CorrMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd entries;
  Eigen::Index samples = 0;  // series length T behind the estimate, 0 if unknown

  Eigen::Index size() const { return entries.rows(); }
};

/// Fixed-grid histogram. Samples outside [lo, hi] land in the nearest edge
/// bin and are also tallied in `overflow`.
struct Histogram {
  Eigen::VectorXd bin_edges;  // bins + 1 ascending edges
  std::vector<std::int64_t> counts;
  Eigen::VectorXd density;  // counts / (total * width)
  std::int64_t overflow = 0;

  std::size_t bins() const { return counts.size(); }
  std::int64_t total() const;
};

/// C_ij = <r_i r_j>, time average over the normalized series.
CorrMatrix correlation_matrix(const NormalizedReturns& nr);

/// Upper-triangle (i < j) entries in row-major order.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> upper_triangle(
    const Eigen::MatrixBase<Derived>& m) {
  const Eigen::Index n = m.rows();
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n * (n - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out(k++) = m(i, j);
  }
  return out;
}

/// Mean of the N(N-1)/2 off-diagonal entries.
template <typename Derived>
typename Derived::Scalar offdiag_mean(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() < 2) throw RangeError("offdiag_mean needs N >= 2");
  return upper_triangle(m).mean();
}

inline double offdiag_mean(const CorrMatrix& c) { return offdiag_mean(c.entries); }

/// Histogram of arbitrary samples on `bins` equal bins over [lo, hi].
Histogram histogram(const Eigen::Ref<const Eigen::VectorXd>& samples, int bins, double lo,
                    double hi);

/// Histogram of the off-diagonal upper-triangle entries of `m`.
Histogram element_histogram(const Eigen::Ref<const Eigen::MatrixXd>& m, int bins, double lo,
                            double hi);

inline Histogram element_histogram(const CorrMatrix& c, int bins = 50, double lo = -1.0,
                                   double hi = 1.0) {
  return element_histogram(c.entries, bins, lo, hi);
}

/// `bin_lo,bin_hi,count,density`
void write_histogram(std::ostream& out, const Histogram& h);

/// Throws ValidationError unless `m` is square and symmetric within `tol`.
void check_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol,
                     const std::string& what);

}  // namespace rmtcorr
