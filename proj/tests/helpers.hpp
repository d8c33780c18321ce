#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "rmtcorr/correlation.hpp"
#include "rmtcorr/ingest.hpp"
#include "rmtcorr/returns.hpp"

namespace testing {

inline std::vector<std::string> labels(Eigen::Index n, const std::string& prefix = "S") {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(fmt::format("{}{:03d}", prefix, i));
  return out;
}

inline rmtcorr::ReturnMatrix as_returns(const Eigen::MatrixXd& values) {
  return {labels(values.rows()), values, 1};
}

inline rmtcorr::NormalizedReturns normalized(const Eigen::MatrixXd& values) {
  return rmtcorr::normalize(as_returns(values));
}

inline rmtcorr::CorrMatrix correlation_of(const Eigen::MatrixXd& values) {
  return rmtcorr::correlation_matrix(normalized(values));
}

/// Off-diagonal entries `c`, unit diagonal.
inline rmtcorr::CorrMatrix uniform_corr(Eigen::Index n, double c) {
  rmtcorr::CorrMatrix m;
  m.tickers = labels(n);
  m.entries = Eigen::MatrixXd::Constant(n, n, c);
  m.entries.diagonal().setOnes();
  return m;
}

inline rmtcorr::PriceTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  return rmtcorr::read_price_table(in);
}

/// Complete table with prices(i, t) = base_i * (1 + 0.01 * ((i + 1) * t % 7)).
inline rmtcorr::PriceTable synthetic_table(Eigen::Index n, Eigen::Index t) {
  rmtcorr::PriceTable table;
  table.tickers = labels(n, "T");
  for (Eigen::Index d = 0; d < t; ++d) table.dates.push_back(fmt::format("2001-{:04d}", d));
  table.prices.resize(n, t);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < t; ++d)
      table.prices(i, d) = (10.0 + static_cast<double>(i)) * (1.0 + 0.01 * static_cast<double>(((i + 1) * d) % 7));
  table.observed = rmtcorr::BoolArray::Constant(n, t, true);
  return table;
}

}  // namespace testing
