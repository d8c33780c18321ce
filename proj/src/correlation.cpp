#include "rmtcorr/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "format.hpp"

namespace rmtcorr {

std::int64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

CorrMatrix correlation_matrix(const NormalizedReturns& nr) {
  const Eigen::Index n = nr.n_stocks();
  const Eigen::Index t = nr.n_times();
  if (n < 1 || t < 2) throw InsufficientDataError("correlation needs N >= 1 and T >= 2");

  CorrMatrix c;
  c.tickers = nr.tickers;
  c.samples = t;
  c.entries.resize(n, n);
  // Lower triangle by a symmetric rank-k update, mirrored; Eigen's product
  // kernels are single-threaded here and sum in a fixed order.
  c.entries.setZero();
  c.entries.selfadjointView<Eigen::Lower>().rankUpdate(nr.values, 1.0 / static_cast<double>(t));
  Eigen::MatrixXd full = c.entries.selfadjointView<Eigen::Lower>();
  c.entries = std::move(full);
  c.entries.diagonal().setOnes();
  return c;
}

Histogram histogram(const Eigen::Ref<const Eigen::VectorXd>& samples, int bins, double lo,
                    double hi) {
  if (bins < 1) throw RangeError("histogram needs at least one bin");
  if (!(lo < hi)) throw RangeError("histogram range must satisfy lo < hi");

  Histogram h;
  h.bin_edges = Eigen::VectorXd::LinSpaced(bins + 1, lo, hi);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (Eigen::Index k = 0; k < samples.size(); ++k) {
    const double x = samples(k);
    if (x < lo || x > hi) ++h.overflow;
    auto bin = static_cast<long>(std::floor((x - lo) / width));
    bin = std::clamp(bin, 0L, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  h.density.resize(bins);
  const auto total = static_cast<double>(samples.size());
  for (int b = 0; b < bins; ++b) {
    h.density(b) = total > 0 ? static_cast<double>(h.counts[static_cast<std::size_t>(b)]) /
                                   (total * width)
                             : 0.0;
  }
  return h;
}

Histogram element_histogram(const Eigen::Ref<const Eigen::MatrixXd>& m, int bins, double lo,
                            double hi) {
  return histogram(upper_triangle(m), bins, lo, hi);
}

void write_histogram(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count,density\n";
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const auto i = static_cast<Eigen::Index>(b);
    out << detail::num(h.bin_edges(i)) << ',' << detail::num(h.bin_edges(i + 1)) << ','
        << h.counts[b] << ',' << detail::num(h.density(i)) << '\n';
  }
}

void check_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol,
                     const std::string& what) {
  if (m.rows() != m.cols()) throw ValidationError(what + " is not square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= tol)) {
    throw ValidationError(what + " is not symmetric (max asymmetry " + detail::num(asym) + ")");
  }
}

}  // namespace rmtcorr
