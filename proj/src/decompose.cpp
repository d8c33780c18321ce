#include "rmtcorr/decompose.hpp"

#include <algorithm>

#include "format.hpp"

namespace rmtcorr {

Eigen::MatrixXd mode_sum(const Spectrum& s, Eigen::Index first, Eigen::Index last) {
  const Eigen::Index n = s.n;
  if (first >= last) return Eigen::MatrixXd::Zero(n, n);
  const auto u = s.eigenvectors.middleCols(first, last - first);
  const auto lambda = s.eigenvalues.segment(first, last - first);
  return u * lambda.asDiagonal() * u.transpose();
}

ModeDecomposition decompose(const Spectrum& s, Eigen::Index n_g) {
  const Eigen::Index n = s.size();
  if (n < 1) throw RangeError("cannot decompose an empty spectrum");
  if (n_g < 0 || n_g > n - 1) {
    throw RangeError("n_g=" + std::to_string(n_g) + " outside [0, " + std::to_string(n - 1) + "]");
  }
  ModeDecomposition d;
  d.n_g = n_g;
  d.market = mode_sum(s, 0, 1);
  d.group = mode_sum(s, 1, 1 + n_g);
  d.random = mode_sum(s, 1 + n_g, n);
  return d;
}

Eigen::Index auto_ng(const Spectrum& s, const MpLaw& law, double margin) {
  const auto deviating = static_cast<Eigen::Index>(deviating_eigenvalues(s, law, margin).size());
  return std::max<Eigen::Index>(deviating - 1, 0);
}

ComponentHistograms component_histograms(const ModeDecomposition& d, int bins, double lo,
                                         double hi) {
  return {element_histogram(d.market, bins, lo, hi), element_histogram(d.group, bins, lo, hi),
          element_histogram(d.random, bins, lo, hi)};
}

void write_matrix(std::ostream& out, const std::vector<std::string>& tickers,
                  const Eigen::Ref<const Eigen::MatrixXd>& m) {
  out << "ticker";
  for (const auto& t : tickers) out << ',' << t;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << tickers[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << detail::num(m(i, j));
    out << '\n';
  }
}

}  // namespace rmtcorr
