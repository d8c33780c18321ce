#include "rmtcorr/factor_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "format.hpp"
#include "rmtcorr/correlation.hpp"
#include "rmtcorr/errors.hpp"
#include "rmtcorr/random.hpp"
#include "rmtcorr/spectrum.hpp"

namespace rmtcorr {

namespace {

constexpr double kConstraintSlack = 1e-12;
constexpr std::int64_t kMinAttemptsBeforeVerdict = 100;
constexpr double kMinAcceptance = 0.01;

void check_sizes(const std::vector<Eigen::Index>& sizes) {
  if (sizes.empty()) throw RangeError("factor model needs at least one sector");
  for (auto n : sizes) {
    if (n < 1) throw RangeError("sector sizes must be positive");
  }
}

Eigen::Index total(const std::vector<Eigen::Index>& sizes) {
  return std::accumulate(sizes.begin(), sizes.end(), Eigen::Index{0});
}

double beta_from(double gamma, double sigma) {
  return std::sqrt(std::max(0.0, 1.0 - gamma * gamma - sigma * sigma));
}

bool feasible(double gamma, double sigma) {
  return gamma * gamma + sigma * sigma <= 1.0 + kConstraintSlack;
}

}  // namespace

std::vector<Eigen::Index> FactorParams::sector_of() const {
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(n_stocks()));
  for (std::size_t k = 0; k < sector_sizes.size(); ++k) {
    out.insert(out.end(), static_cast<std::size_t>(sector_sizes[k]), static_cast<Eigen::Index>(k));
  }
  return out;
}

std::vector<std::string> FactorParams::tickers() const {
  std::vector<std::string> out;
  const auto sectors = sector_of();
  for (Eigen::Index i = 0; i < n_stocks(); ++i) {
    out.push_back(fmt::format("G{:02d}S{:04d}", sectors[static_cast<std::size_t>(i)] + 1, i));
  }
  return out;
}

SectorMap FactorParams::sector_map() const {
  SectorMap map;
  const auto names = tickers();
  const auto sectors = sector_of();
  for (std::size_t i = 0; i < names.size(); ++i) {
    map.assignments.emplace(names[i], fmt::format("G{:02d}", sectors[i] + 1));
  }
  return map;
}

Eigen::Index AnalyticSpectrum::total_multiplicity() const {
  Eigen::Index m = 0;
  for (const auto& l : large) m += l.multiplicity;
  for (const auto& l : small) m += l.multiplicity;
  return m;
}

double AnalyticSpectrum::trace() const {
  double t = 0.0;
  for (const auto& l : large) t += l.value * static_cast<double>(l.multiplicity);
  for (const auto& l : small) t += l.value * static_cast<double>(l.multiplicity);
  return t;
}

Eigen::VectorXd AnalyticSpectrum::expanded() const {
  std::vector<double> all;
  for (const auto* levels : {&large, &small}) {
    for (const auto& l : *levels) all.insert(all.end(), static_cast<std::size_t>(l.multiplicity), l.value);
  }
  std::sort(all.begin(), all.end(), std::greater<>());
  return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

FactorParams uniform_params(const std::vector<Eigen::Index>& sizes, double gamma, double sigma) {
  check_sizes(sizes);
  if (gamma < 0 || gamma > 1 || sigma < 0 || sigma > 1 || !feasible(gamma, sigma)) {
    throw FeasibilityError(fmt::format("(gamma={}, sigma={}) violates gamma^2 + sigma^2 <= 1",
                                       gamma, sigma));
  }
  const Eigen::Index n = total(sizes);
  FactorParams p;
  p.sector_sizes = sizes;
  p.gamma = Eigen::VectorXd::Constant(n, gamma);
  p.sigma = Eigen::VectorXd::Constant(n, sigma);
  p.beta = Eigen::VectorXd::Constant(n, beta_from(gamma, sigma));
  return p;
}

FactorParams sample_params(const std::vector<Eigen::Index>& sizes, double gamma_mean,
                           double sigma_mean, double width, std::uint64_t seed) {
  check_sizes(sizes);
  if (gamma_mean < 0 || gamma_mean > 1 || sigma_mean < 0 || sigma_mean > 1) {
    throw RangeError("factor strengths must lie in [0, 1]");
  }
  if (!(width >= 0)) throw RangeError("sampling width must be nonnegative");

  const Eigen::Index n = total(sizes);
  FactorParams p;
  p.sector_sizes = sizes;
  p.beta.resize(n);
  p.gamma.resize(n);
  p.sigma.resize(n);

  auto engine = make_stream(seed, stream::kParams);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::int64_t attempts = 0;
  std::int64_t accepted = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    while (true) {
      const double g = std::clamp(gamma_mean + width * unit(engine), 0.0, 1.0);
      const double s = std::clamp(sigma_mean + width * unit(engine), 0.0, 1.0);
      ++attempts;
      if (feasible(g, s)) {
        ++accepted;
        p.gamma(i) = g;
        p.sigma(i) = s;
        p.beta(i) = beta_from(g, s);
        break;
      }
      if (attempts >= kMinAttemptsBeforeVerdict &&
          static_cast<double>(accepted) < kMinAcceptance * static_cast<double>(attempts)) {
        throw FeasibilityError(fmt::format(
            "(gamma={}, sigma={}, width={}): fewer than 1% of draws satisfy "
            "gamma^2 + sigma^2 <= 1",
            gamma_mean, sigma_mean, width));
      }
    }
  }
  return p;
}

ReturnMatrix simulate_returns(const FactorParams& p, Eigen::Index t_len, std::uint64_t seed) {
  if (t_len < 2) throw RangeError("simulation needs at least 2 time steps");
  const Eigen::Index n = p.n_stocks();
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](std::uint64_t id) {
    auto engine = make_stream(seed, id);
    Eigen::RowVectorXd series(t_len);
    for (Eigen::Index t = 0; t < t_len; ++t) series(t) = gauss(engine);
    gauss.reset();
    return series;
  };

  const Eigen::RowVectorXd market = draw(stream::kMarket);
  std::vector<Eigen::RowVectorXd> sector_factors;
  for (Eigen::Index k = 0; k < p.n_sectors(); ++k) {
    sector_factors.push_back(draw(stream::kSectorBase + static_cast<std::uint64_t>(k)));
  }

  ReturnMatrix r;
  r.tickers = p.tickers();
  r.dt = 1;
  r.values.resize(n, t_len);
  const auto sectors = p.sector_of();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& sector = sector_factors[static_cast<std::size_t>(sectors[static_cast<std::size_t>(i)])];
    r.values.row(i) = p.beta(i) * market + p.gamma(i) * sector +
                      p.sigma(i) * draw(stream::kStockBase + static_cast<std::uint64_t>(i));
  }
  return r;
}

Eigen::MatrixXd population_correlation(const FactorParams& p) {
  Eigen::MatrixXd c = p.beta * p.beta.transpose();
  Eigen::Index offset = 0;
  for (auto size : p.sector_sizes) {
    const auto g = p.gamma.segment(offset, size);
    c.block(offset, offset, size, size) += g * g.transpose();
    offset += size;
  }
  c.diagonal().setOnes();
  return c;
}

AnalyticSpectrum analytic_spectrum_no_market(const std::vector<Eigen::Index>& sizes,
                                             const std::vector<double>& gammas) {
  check_sizes(sizes);
  if (gammas.size() != sizes.size()) throw RangeError("need one gamma per sector");
  AnalyticSpectrum s;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const double g2 = gammas[j] * gammas[j];
    const auto n = static_cast<double>(sizes[j]);
    s.large.push_back({1.0 + (n - 1.0) * g2, 1});
    if (sizes[j] > 1) s.small.push_back({1.0 - g2, sizes[j] - 1});
  }
  return s;
}

ExtremesPrediction analytic_extremes(double beta, const std::vector<Eigen::Index>& sizes,
                                     double gamma) {
  check_sizes(sizes);
  const double b2 = beta * beta;
  const auto n = static_cast<double>(total(sizes));
  const auto n_l = static_cast<double>(*std::max_element(sizes.begin(), sizes.end()));
  return {n * b2, n_l * (1.0 - b2), 1.0 - b2 - gamma * gamma, beta > 0.0};
}

std::vector<SweepPoint> sweep(const std::vector<Eigen::Index>& sizes,
                              const std::vector<double>& gamma_grid,
                              const std::vector<double>& sigma_grid, double width,
                              Eigen::Index t_len, std::uint64_t seed) {
  check_sizes(sizes);
  std::vector<SweepPoint> out;
  std::uint64_t index = 0;
  for (double g : gamma_grid) {
    for (double s : sigma_grid) {
      SweepPoint pt;
      pt.gamma = g;
      pt.sigma = s;
      const std::uint64_t point_seed = splitmix64(seed ^ splitmix64(++index));
      if (g >= 0 && s >= 0 && feasible(g, s)) {
        try {
          const FactorParams p = sample_params(sizes, g, s, width, point_seed);
          const ReturnMatrix r = simulate_returns(p, t_len, point_seed);
          const Spectrum spec = eigendecompose(correlation_matrix(normalize(r)));
          pt.feasible = true;
          pt.beta_sq_mean = p.beta.squaredNorm() / static_cast<double>(p.n_stocks());
          pt.lambda0 = spec.eigenvalues(0);
          pt.lambda1 = spec.size() > 1 ? spec.eigenvalues(1) : 0.0;
        } catch (const FeasibilityError&) {
          pt.feasible = false;
        }
      }
      out.push_back(pt);
    }
  }
  if (std::none_of(out.begin(), out.end(), [](const SweepPoint& p) { return p.feasible; })) {
    throw FeasibilityError("no feasible (gamma, sigma) point in the sweep grid");
  }
  return out;
}

void write_sweep(std::ostream& out, const std::vector<SweepPoint>& surface) {
  out << "gamma,sigma,beta_sq_mean,lambda0,lambda1\n";
  for (const auto& p : surface) {
    if (!p.feasible) continue;
    out << detail::num(p.gamma) << ',' << detail::num(p.sigma) << ','
        << detail::num(p.beta_sq_mean) << ',' << detail::num(p.lambda0) << ','
        << detail::num(p.lambda1) << '\n';
  }
}

void write_feasibility(std::ostream& out, const std::vector<SweepPoint>& surface) {
  out << "gamma,sigma,feasible\n";
  for (const auto& p : surface) {
    out << detail::num(p.gamma) << ',' << detail::num(p.sigma) << ',' << (p.feasible ? 1 : 0)
        << '\n';
  }
}

PriceTable prices_from_returns(const ReturnMatrix& r, double scale) {
  const Eigen::Index n = r.values.rows();
  const Eigen::Index t = r.values.cols();
  PriceTable table;
  table.tickers = r.tickers;
  for (Eigen::Index d = 0; d <= t; ++d) table.dates.push_back(fmt::format("t{:06d}", d));
  table.prices.resize(n, t + 1);
  table.prices.col(0).setConstant(100.0);
  for (Eigen::Index d = 0; d < t; ++d) {
    table.prices.col(d + 1) = (table.prices.col(d).array() * (scale * r.values.col(d).array()).exp()).matrix();
  }
  table.observed = BoolArray::Constant(n, t + 1, true);
  return table;
}

}  // namespace rmtcorr
