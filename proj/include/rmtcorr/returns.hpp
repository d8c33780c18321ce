#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtcorr/errors.hpp"
#include "rmtcorr/ingest.hpp"

namespace rmtcorr {

/// Log returns over a horizon of `dt` trading days; rows are stocks.
struct ReturnMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;
  int dt = 1;
};

/// Returns standardized per stock to zero mean and unit (population)
/// variance. `means` and `sigmas` are the statistics that were removed.
struct NormalizedReturns {
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;
  Eigen::VectorXd means;
  Eigen::VectorXd sigmas;

  Eigen::Index n_stocks() const { return values.rows(); }
  Eigen::Index n_times() const { return values.cols(); }
};

/// Population standard deviation, sqrt(<x^2> - <x>^2), by two passes.
/// Returns 0 for a constant series; callers decide whether that is an error.
template <typename Derived>
typename Derived::Scalar population_stddev(const Eigen::DenseBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<Scalar>(series.size());
  const Scalar mean = series.sum() / n;
  const Scalar var = (series.derived().array() - mean).square().sum() / n;
  return std::sqrt(var);
}

/// True when the series' spread is indistinguishable from rounding noise.
template <typename Derived>
bool is_constant_series(const Eigen::DenseBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  const Scalar scale = series.derived().cwiseAbs().maxCoeff();
  const Scalar sigma = population_stddev(series);
  return !(sigma > 16 * std::numeric_limits<Scalar>::epsilon() * scale);
}

/// Volatility of one return series. Throws ZeroVolatilityError (naming
/// `ticker`) when the series is constant and RangeError when shorter than 2.
template <typename Derived>
typename Derived::Scalar volatility(const Eigen::DenseBase<Derived>& series,
                                    const std::string& ticker = "<unnamed>") {
  if (series.size() < 2) throw RangeError("volatility needs at least 2 observations");
  if (is_constant_series(series)) throw ZeroVolatilityError(ticker);
  return population_stddev(series);
}

/// values(i, t) = ln P_i(t + dt) - ln P_i(t).
ReturnMatrix log_returns(const PriceTable& table, int dt = 1);

/// (R_i(t) - <R_i>) / sigma_i row by row.
NormalizedReturns normalize(const ReturnMatrix& returns);

/// Tickers whose return rows have zero variance.
std::vector<std::string> degenerate_tickers(const ReturnMatrix& returns);

/// Remove the named rows.
ReturnMatrix drop_tickers(const ReturnMatrix& returns, const std::vector<std::string>& drop);

}  // namespace rmtcorr
