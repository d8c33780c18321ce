#pragma once

#include <array>

#include <Eigen/Dense>

#include "rmtcorr/correlation.hpp"
#include "rmtcorr/spectrum.hpp"

namespace rmtcorr {

/// C split into the market mode, the next `n_g` group modes and the rest.
struct ModeDecomposition {
  Eigen::MatrixXd market;
  Eigen::MatrixXd group;
  Eigen::MatrixXd random;
  Eigen::Index n_g = 0;

  Eigen::MatrixXd sum() const { return market + group + random; }
};

/// Sum of lambda_k u_k u_k^T over eigen-indices [first, last).
Eigen::MatrixXd mode_sum(const Spectrum& s, Eigen::Index first, Eigen::Index last);

/// market = lambda_0 u_0 u_0^T, group = modes 1..n_g, random = n_g+1..N-1.
ModeDecomposition decompose(const Spectrum& s, Eigen::Index n_g);

/// Number of deviating eigenvalues other than lambda_0, floored at 0.
Eigen::Index auto_ng(const Spectrum& s, const MpLaw& law, double margin = 0.0);

/// Element histograms of the three components on one shared bin grid.
struct ComponentHistograms {
  Histogram market;
  Histogram group;
  Histogram random;
};

ComponentHistograms component_histograms(const ModeDecomposition& d, int bins, double lo,
                                         double hi);

/// Comma-separated matrix with a `ticker,<tickers...>` header row.
void write_matrix(std::ostream& out, const std::vector<std::string>& tickers,
                  const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace rmtcorr
