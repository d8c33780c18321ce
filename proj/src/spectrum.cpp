#include "rmtcorr/spectrum.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "format.hpp"
#include "rmtcorr/random.hpp"

namespace rmtcorr {

MpLaw mp_bounds(double q) {
  if (!(q >= 1.0)) throw RangeError("Marchenko-Pastur bounds need Q = T/N >= 1, got " +
                                    detail::num(q));
  const double r = 1.0 / std::sqrt(q);
  return {q, (1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

void orient_eigenvectors(Eigen::Ref<Eigen::MatrixXd> vectors) {
  const double tie = 1e-12 * std::sqrt(static_cast<double>(std::max<Eigen::Index>(vectors.rows(), 1)));
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    auto v = vectors.col(k);
    const double sum = v.sum();
    bool flip = sum < -tie;
    if (std::abs(sum) <= tie) {
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
          flip = v(i) < 0;
          break;
        }
      }
    }
    if (flip) v = -v;
  }
}

Spectrum eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& m, Eigen::Index samples) {
  check_symmetric(m, 1e-10, "correlation matrix");
  const Eigen::Index n = m.rows();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ValidationError("eigensolver did not converge");

  // The solver returns ascending order; reverse into descending.
  Spectrum s;
  s.n = n;
  s.t = samples;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();
  orient_eigenvectors(s.eigenvectors);
  return s;
}

Spectrum eigendecompose(const CorrMatrix& c) {
  Spectrum s = eigendecompose(c.entries, c.samples);
  s.tickers = c.tickers;
  return s;
}

NormalizedReturns shuffle_rows(const NormalizedReturns& nr, std::uint64_t seed) {
  NormalizedReturns out = nr;
  for (Eigen::Index i = 0; i < out.n_stocks(); ++i) {
    auto engine = make_stream(seed, stream::kShuffleBase + static_cast<std::uint64_t>(i));
    Eigen::RowVectorXd row = out.values.row(i);
    std::shuffle(row.begin(), row.end(), engine);
    out.values.row(i) = row;
  }
  return out;
}

CorrMatrix shuffle_surrogate(const NormalizedReturns& nr, std::uint64_t seed) {
  return correlation_matrix(shuffle_rows(nr, seed));
}

std::vector<Eigen::Index> deviating_eigenvalues(const Spectrum& s, const MpLaw& law,
                                                double margin) {
  if (margin < 0) throw RangeError("deviation margin must be nonnegative");
  const double cut = law.lambda_max * (1.0 + margin);
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s.eigenvalues(k) > cut) out.push_back(k);
  }
  return out;
}

Eigen::VectorXd ipr_all(const Spectrum& s) {
  Eigen::VectorXd out(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) out(k) = ipr(s.eigenvectors.col(k));
  return out;
}

std::vector<EigenvectorEntry> eigenvector_report(const Spectrum& s, const SectorMap& sectors,
                                                 Eigen::Index k) {
  if (k < 0 || k >= s.size()) {
    throw RangeError("eigenvector index " + std::to_string(k) + " outside [0, " +
                     std::to_string(s.size()) + ")");
  }
  if (static_cast<Eigen::Index>(s.tickers.size()) != s.n) {
    throw ValidationError("spectrum carries no ticker labels");
  }
  std::vector<EigenvectorEntry> out;
  out.reserve(s.tickers.size());
  for (std::size_t i = 0; i < s.tickers.size(); ++i) {
    const double u = s.eigenvectors(static_cast<Eigen::Index>(i), k);
    out.push_back({s.tickers[i], sectors.sector_of(s.tickers[i]), u, std::abs(u)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.sector, a.ticker) < std::tie(b.sector, b.ticker);
  });
  return out;
}

std::map<std::string, double> sector_weights(const std::vector<EigenvectorEntry>& report) {
  std::map<std::string, double> out;
  double total = 0.0;
  for (const auto& e : report) {
    out[e.sector] += e.component * e.component;
    total += e.component * e.component;
  }
  if (total > 0) {
    for (auto& [sector, w] : out) w /= total;
  }
  return out;
}

void write_spectrum(std::ostream& out, const Spectrum& s) {
  const Eigen::VectorXd iprs = ipr_all(s);
  out << "k,lambda,ipr\n";
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    out << k << ',' << detail::num(s.eigenvalues(k)) << ',' << detail::num(iprs(k)) << '\n';
  }
}

void write_eigenvector_report(std::ostream& out, const std::vector<EigenvectorEntry>& report) {
  out << "ticker,sector,component,abs_component\n";
  for (const auto& e : report) {
    out << e.ticker << ',' << e.sector << ',' << detail::num(e.component) << ','
        << detail::num(e.abs_component) << '\n';
  }
}

void write_mp_curve(std::ostream& out, const MpLaw& law, double lo, double hi, int points) {
  if (points < 2 || !(lo < hi)) throw RangeError("MP curve needs >= 2 points and lo < hi");
  out << "lambda,density\n";
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(points, lo, hi);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << detail::num(grid(i)) << ',' << detail::num(mp_density(grid(i), law)) << '\n';
  }
}

}  // namespace rmtcorr
