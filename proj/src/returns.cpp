#include "rmtcorr/returns.hpp"

#include <algorithm>

namespace rmtcorr {

ReturnMatrix log_returns(const PriceTable& table, int dt) {
  if (!table.complete()) {
    throw MissingDataError("price table has missing cells; forward-fill it first");
  }
  if (dt < 1 || dt >= table.n_dates()) {
    throw RangeError("return horizon dt=" + std::to_string(dt) + " outside [1, " +
                     std::to_string(table.n_dates() - 1) + "]");
  }
  const Eigen::Index cols = table.n_dates() - dt;
  const Eigen::ArrayXXd logp = table.prices.array().log();

  ReturnMatrix out;
  out.tickers = table.tickers;
  out.dt = dt;
  out.values = (logp.rightCols(cols) - logp.leftCols(cols)).matrix();
  if (!out.values.allFinite()) throw ValidationError("non-finite log return");
  return out;
}

NormalizedReturns normalize(const ReturnMatrix& returns) {
  const Eigen::Index n = returns.values.rows();
  const Eigen::Index t = returns.values.cols();

  NormalizedReturns out;
  out.tickers = returns.tickers;
  out.values.resize(n, t);
  out.means.resize(n);
  out.sigmas.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = returns.values.row(i);
    const double sigma = volatility(row, returns.tickers[static_cast<std::size_t>(i)]);
    const double mean = row.mean();
    out.means(i) = mean;
    out.sigmas(i) = sigma;
    out.values.row(i) = (row.array() - mean) / sigma;
  }
  return out;
}

std::vector<std::string> degenerate_tickers(const ReturnMatrix& returns) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < returns.values.rows(); ++i) {
    if (is_constant_series(returns.values.row(i))) {
      out.push_back(returns.tickers[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

ReturnMatrix drop_tickers(const ReturnMatrix& returns, const std::vector<std::string>& drop) {
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < returns.tickers.size(); ++i) {
    if (std::find(drop.begin(), drop.end(), returns.tickers[i]) == drop.end()) {
      keep.push_back(static_cast<Eigen::Index>(i));
    }
  }
  ReturnMatrix out;
  out.dt = returns.dt;
  out.values.resize(static_cast<Eigen::Index>(keep.size()), returns.values.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.tickers.push_back(returns.tickers[static_cast<std::size_t>(keep[k])]);
    out.values.row(static_cast<Eigen::Index>(k)) = returns.values.row(keep[k]);
  }
  return out;
}

}  // namespace rmtcorr
