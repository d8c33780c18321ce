#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtcorr/ingest.hpp"
#include "rmtcorr/returns.hpp"

namespace rmtcorr {

/// Per-stock loadings of the two-factor model
///   r_i(t) = beta_i r_m(t) + gamma_i r_g^k(t) + sigma_i eta_i(t)
/// with beta_i^2 + gamma_i^2 + sigma_i^2 = 1. Stocks are laid out sector by
/// sector in the order of `sector_sizes`.
struct FactorParams {
  std::vector<Eigen::Index> sector_sizes;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  Eigen::VectorXd sigma;

  Eigen::Index n_stocks() const { return beta.size(); }
  Eigen::Index n_sectors() const { return static_cast<Eigen::Index>(sector_sizes.size()); }
  /// Sector index of every stock.
  std::vector<Eigen::Index> sector_of() const;
  std::vector<std::string> tickers() const;
  SectorMap sector_map() const;
};

/// Eigenvalues with multiplicities; `large` holds one entry per sector.
struct AnalyticSpectrum {
  struct Level {
    double value = 0.0;
    Eigen::Index multiplicity = 0;
  };
  std::vector<Level> large;
  std::vector<Level> small;

  Eigen::Index total_multiplicity() const;
  double trace() const;
  /// All N eigenvalues, descending.
  Eigen::VectorXd expanded() const;
};

struct ExtremesPrediction {
  double lambda0 = 0.0;  // N beta^2
  double lambda1 = 0.0;  // n_l (1 - beta^2)
  double bulk = 0.0;     // 1 - beta^2 - gamma^2
  bool in_regime = true;  // false when beta == 0: the scaling assumes a dominant market
};

/// Uniform loadings: every stock gets (beta, gamma, sigma) with beta derived
/// from the unit-variance constraint.
FactorParams uniform_params(const std::vector<Eigen::Index>& sizes, double gamma, double sigma);

/// gamma_i, sigma_i ~ U[mean - width/2, mean + width/2] clamped to [0, 1],
/// redrawn until gamma^2 + sigma^2 <= 1; beta_i = sqrt(1 - gamma_i^2 - sigma_i^2).
/// Throws FeasibilityError when more than 99% of draws are rejected.
FactorParams sample_params(const std::vector<Eigen::Index>& sizes, double gamma_mean,
                           double sigma_mean, double width, std::uint64_t seed);

/// Returns from the model over `t_len` days. The market, each sector and each
/// stock draw standard Gaussians from their own sub-stream of `seed`.
ReturnMatrix simulate_returns(const FactorParams& p, Eigen::Index t_len, std::uint64_t seed);

/// Expected correlation matrix: 1 on the diagonal, beta_i beta_j plus
/// gamma_i gamma_j within a sector.
Eigen::MatrixXd population_correlation(const FactorParams& p);

/// beta = 0 spectrum: 1 + (n_j - 1) gamma_j^2 once per sector, and
/// 1 - gamma_j^2 with multiplicity n_j - 1.
AnalyticSpectrum analytic_spectrum_no_market(const std::vector<Eigen::Index>& sizes,
                                             const std::vector<double>& gammas);

/// Leading eigenvalue scalings for uniform beta and gamma.
ExtremesPrediction analytic_extremes(double beta, const std::vector<Eigen::Index>& sizes,
                                     double gamma = 0.0);

struct SweepPoint {
  double gamma = 0.0;
  double sigma = 0.0;
  bool feasible = false;
  double beta_sq_mean = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
};

/// (lambda_0, lambda_1) of simulated markets on the gamma x sigma grid,
/// row-major in gamma. Grid point g uses sub-stream g of `seed`. Points with
/// gamma^2 + sigma^2 > 1 are reported infeasible; a grid with no feasible
/// point throws FeasibilityError.
std::vector<SweepPoint> sweep(const std::vector<Eigen::Index>& sizes,
                              const std::vector<double>& gamma_grid,
                              const std::vector<double>& sigma_grid, double width,
                              Eigen::Index t_len, std::uint64_t seed);

/// `gamma,sigma,beta_sq_mean,lambda0,lambda1` for feasible points.
void write_sweep(std::ostream& out, const std::vector<SweepPoint>& surface);

/// `gamma,sigma,feasible` for every grid point.
void write_feasibility(std::ostream& out, const std::vector<SweepPoint>& surface);

/// Prices exp(cumsum(scale * r)) starting at 100 on synthetic day labels,
/// so a simulated market can be fed back through the price pipeline.
PriceTable prices_from_returns(const ReturnMatrix& r, double scale = 0.01);

}  // namespace rmtcorr
