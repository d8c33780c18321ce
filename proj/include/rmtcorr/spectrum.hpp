#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtcorr/correlation.hpp"
#include "rmtcorr/errors.hpp"
#include "rmtcorr/ingest.hpp"

namespace rmtcorr {

/// Eigenpairs of a correlation matrix, eigenvalues descending.
///
/// Column k of `eigenvectors` belongs to `eigenvalues(k)` and is oriented
/// so that its components sum to a nonnegative value; when the sum is zero
/// the first nonzero component is positive.
struct Spectrum {
  std::vector<std::string> tickers;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::Index n = 0;  // stocks
  Eigen::Index t = 0;  // series length, 0 if unknown

  double q() const { return n > 0 ? static_cast<double>(t) / static_cast<double>(n) : 0.0; }
  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Support of the Marchenko-Pastur law for Q = T/N.
struct MpLaw {
  double q = 1.0;
  double lambda_min = 0.0;
  double lambda_max = 4.0;
};

/// lambda_{max,min} = (1 +- 1/sqrt(q))^2, q >= 1.
MpLaw mp_bounds(double q);

/// Marchenko-Pastur density (q / 2 pi) sqrt((l+ - x)(x - l-)) / x on the
/// support, zero elsewhere.
template <typename Scalar>
Scalar mp_density(Scalar lambda, const MpLaw& law) {
  const Scalar lo = static_cast<Scalar>(law.lambda_min);
  const Scalar hi = static_cast<Scalar>(law.lambda_max);
  if (!(lambda > lo && lambda < hi)) return Scalar(0);
  const Scalar q = static_cast<Scalar>(law.q);
  return q / (2 * std::numbers::pi_v<Scalar>) * std::sqrt((hi - lambda) * (lambda - lo)) / lambda;
}

/// Full symmetric eigendecomposition with the ordering and sign convention
/// of Spectrum. Throws ValidationError for input asymmetric beyond 1e-10.
Spectrum eigendecompose(const CorrMatrix& c);
Spectrum eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& m, Eigen::Index samples = 0);

/// Flip each column so the sign convention of Spectrum holds.
void orient_eigenvectors(Eigen::Ref<Eigen::MatrixXd> vectors);

/// Correlation matrix after permuting every stock's series independently
/// (stock i draws from sub-stream i of `seed`).
CorrMatrix shuffle_surrogate(const NormalizedReturns& nr, std::uint64_t seed);

/// Shuffle each row independently; exposed for tests and the CLI.
NormalizedReturns shuffle_rows(const NormalizedReturns& nr, std::uint64_t seed);

/// Indices k with lambda_k > lambda_max (1 + margin), ascending.
std::vector<Eigen::Index> deviating_eigenvalues(const Spectrum& s, const MpLaw& law,
                                                double margin = 0.0);

/// Inverse participation ratio sum_i u_i^4 of a unit vector.
template <typename Derived>
typename Derived::Scalar ipr(const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  if (!(std::abs(u.norm() - Scalar(1)) <= Scalar(1e-8))) {
    throw ValidationError("ipr needs a unit vector");
  }
  return u.array().square().square().sum();
}

/// IPR of every eigenvector, aligned with eigenvalues.
Eigen::VectorXd ipr_all(const Spectrum& s);

struct EigenvectorEntry {
  std::string ticker;
  std::string sector;
  double component = 0.0;
  double abs_component = 0.0;
};

/// Components of eigenvector k, sorted by sector then ticker.
std::vector<EigenvectorEntry> eigenvector_report(const Spectrum& s, const SectorMap& sectors,
                                                 Eigen::Index k);

/// Share of sum u_i^2 carried by each sector.
std::map<std::string, double> sector_weights(const std::vector<EigenvectorEntry>& report);

/// `k,lambda,ipr`
void write_spectrum(std::ostream& out, const Spectrum& s);

/// `ticker,sector,component,abs_component`
void write_eigenvector_report(std::ostream& out, const std::vector<EigenvectorEntry>& report);

/// `lambda,density` on `points` evenly spaced abscissae over [lo, hi].
void write_mp_curve(std::ostream& out, const MpLaw& law, double lo, double hi, int points);

}  // namespace rmtcorr
