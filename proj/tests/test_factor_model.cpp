#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "rmtcorr/errors.hpp"
#include "rmtcorr/factor_model.hpp"
#include "rmtcorr/spectrum.hpp"

using namespace rmtcorr;

TEST_CASE("sample_params") {
  const std::vector<Eigen::Index> sizes{20, 20, 10};
  const FactorParams fixed = sample_params(sizes, 0.6, 0.6, 0.0, 1);
  CHECK(fixed.n_stocks() == 50);
  CHECK((fixed.beta.array() - std::sqrt(0.28)).abs().maxCoeff() <= 1e-15);
  CHECK(fixed.beta(0) == doctest::Approx(0.5292).epsilon(1e-4));

  const FactorParams noise = sample_params(sizes, 0.0, 1.0, 0.0, 1);
  CHECK(noise.beta.isZero(0.0));

  const FactorParams spread = sample_params(sizes, 0.4, 0.5, 0.05, 9);
  const Eigen::ArrayXd total = spread.beta.array().square() + spread.gamma.array().square() +
                               spread.sigma.array().square();
  CHECK((total - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(spread.gamma.minCoeff() >= 0.375);
  CHECK(spread.gamma.maxCoeff() <= 0.425);
  CHECK(spread.sigma.minCoeff() >= 0.475);
  CHECK(spread.sigma.maxCoeff() <= 0.525);
  CHECK(sample_params(sizes, 0.4, 0.5, 0.05, 9).gamma == spread.gamma);
  CHECK(sample_params(sizes, 0.4, 0.5, 0.05, 10).gamma != spread.gamma);

  // Near the boundary the rejection step keeps every draw feasible.
  const FactorParams edge = sample_params(sizes, 0.7, 0.7, 0.1, 3);
  CHECK((edge.gamma.array().square() + edge.sigma.array().square()).maxCoeff() <= 1.0 + 1e-12);

  CHECK_THROWS_AS(sample_params(sizes, 0.9, 0.9, 0.0, 1), FeasibilityError);
  CHECK_THROWS_AS(sample_params(sizes, 0.9, 0.9, 0.05, 1), FeasibilityError);
  CHECK_THROWS_AS(sample_params(sizes, 1.2, 0.1, 0.0, 1), RangeError);
  CHECK_THROWS_AS(sample_params({}, 0.1, 0.1, 0.0, 1), RangeError);
}

TEST_CASE("simulate_returns limits") {
  const std::vector<Eigen::Index> sizes{5, 5};
  const ReturnMatrix pure_market = simulate_returns(uniform_params(sizes, 0.0, 0.0), 300, 4);
  for (Eigen::Index i = 1; i < 10; ++i) CHECK(pure_market.values.row(i) == pure_market.values.row(0));
  const CorrMatrix ones = correlation_matrix(normalize(pure_market));
  CHECK((ones.entries.array() - 1.0).abs().maxCoeff() <= 1e-12);

  const FactorParams noise = uniform_params(std::vector<Eigen::Index>(10, 20), 0.0, 1.0);
  const Spectrum s = eigendecompose(correlation_matrix(normalize(simulate_returns(noise, 2000, 5))));
  const MpLaw law = mp_bounds(s.q());
  const auto inside = (s.eigenvalues.array() >= law.lambda_min * 0.95 &&
                       s.eigenvalues.array() <= law.lambda_max * 1.05).count();
  CHECK(static_cast<double>(inside) / 200.0 >= 0.99);

  CHECK(simulate_returns(noise, 50, 6).values == simulate_returns(noise, 50, 6).values);
  CHECK(simulate_returns(noise, 50, 6).values != simulate_returns(noise, 50, 7).values);
  CHECK_THROWS_AS(simulate_returns(noise, 1, 6), RangeError);
}

TEST_CASE("simulated stocks have unit variance") {
  const FactorParams p = sample_params(std::vector<Eigen::Index>(10, 20), 0.5, 0.4, 0.05, 2);
  const ReturnMatrix r = simulate_returns(p, 2000, 2);
  for (Eigen::Index i = 0; i < r.values.rows(); ++i) {
    const double sd = population_stddev(r.values.row(i));
    CHECK(sd * sd >= 0.9);
    CHECK(sd * sd <= 1.1);
  }
}

TEST_CASE("analytic_spectrum_no_market") {
  // Oracle: Jacobi eigenvalues of the exact 20 x 20 matrix with off-diagonal 0.09.
  Eigen::MatrixXd pop = Eigen::MatrixXd::Constant(20, 20, 0.09);
  pop.diagonal().setOnes();
  const Eigen::VectorXd oracle_ev = oracle::jacobi_eigenvalues(pop);
  CHECK(oracle_ev(19) == doctest::Approx(2.71).epsilon(1e-12));
  CHECK((oracle_ev.head(19).array() - 0.91).abs().maxCoeff() <= 1e-12);

  const AnalyticSpectrum a = analytic_spectrum_no_market({20}, {0.3});
  REQUIRE(a.large.size() == 1);
  CHECK(a.large[0].value == doctest::Approx(2.71).epsilon(1e-14));
  REQUIRE(a.small.size() == 1);
  CHECK(a.small[0].value == doctest::Approx(0.91).epsilon(1e-14));
  CHECK(a.small[0].multiplicity == 19);
  CHECK(a.trace() == doctest::Approx(20.0).epsilon(1e-14));
  CHECK((a.expanded() - oracle_ev.reverse()).cwiseAbs().maxCoeff() <= 1e-12);

  const AnalyticSpectrum flat = analytic_spectrum_no_market({7, 3}, {0.0, 0.0});
  CHECK((flat.expanded().array() - 1.0).abs().maxCoeff() == 0.0);

  const std::vector<Eigen::Index> mixed{12, 5, 1, 30};
  const AnalyticSpectrum m = analytic_spectrum_no_market(mixed, {0.9, 0.1, 0.5, 0.35});
  CHECK(m.total_multiplicity() == 48);
  CHECK(m.trace() == doctest::Approx(48.0).epsilon(1e-12));
  FactorParams p;
  p.sector_sizes = mixed;
  p.beta = Eigen::VectorXd::Zero(48);
  p.gamma.resize(48);
  p.gamma << Eigen::VectorXd::Constant(12, 0.9), Eigen::VectorXd::Constant(5, 0.1),
      Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(30, 0.35);
  p.sigma = (1.0 - p.gamma.array().square()).sqrt().matrix();
  CHECK((m.expanded() - oracle::jacobi_eigenvalues(population_correlation(p)).reverse()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("degenerate bulk of the uniform two-factor population matrix") {
  const std::vector<Eigen::Index> sizes(5, 8);
  const FactorParams p = uniform_params(sizes, 0.5, 0.4);
  const double b2 = p.beta(0) * p.beta(0);
  const Eigen::VectorXd ev = oracle::jacobi_eigenvalues(population_correlation(p));
  CHECK((ev.head(40 - 5).array() - (1.0 - b2 - 0.25)).abs().maxCoeff() <= 1e-10);
  CHECK(ev.sum() == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("analytic_extremes") {
  const std::vector<Eigen::Index> sizes(10, 20);
  const ExtremesPrediction e = analytic_extremes(std::sqrt(0.4), sizes, 0.3);
  CHECK(e.lambda0 == doctest::Approx(80.0).epsilon(1e-12));
  CHECK(e.lambda1 == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(e.bulk == doctest::Approx(0.51).epsilon(1e-12));
  CHECK(e.in_regime);
  const ExtremesPrediction none = analytic_extremes(0.0, sizes);
  CHECK(none.lambda0 == 0.0);
  CHECK_FALSE(none.in_regime);
  CHECK(analytic_extremes(0.5, {3, 9, 4}).lambda1 == doctest::Approx(9 * 0.75));
}

TEST_CASE("sweep") {
  const std::vector<Eigen::Index> sizes(10, 20);
  const auto rank_one = sweep(sizes, {0.0}, {0.0}, 0.0, 300, 1);
  REQUIRE(rank_one.size() == 1);
  CHECK(rank_one[0].feasible);
  CHECK(std::abs(rank_one[0].lambda0 - 200.0) <= 1e-6);

  const std::vector<double> sigmas{0.1, 0.25, 0.4, 0.55, 0.7};
  const auto surface = sweep(sizes, {0.2, 0.4, 0.6}, sigmas, 0.05, 2000, 7);
  REQUIRE(surface.size() == 15);
  for (int gi = 0; gi < 3; ++gi) {
    std::vector<double> l0;
    for (int si = 0; si < 5; ++si) l0.push_back(surface[static_cast<std::size_t>(gi * 5 + si)].lambda0);
    CHECK(oracle::spearman(sigmas, l0) < -0.9);
  }
  for (int si = 0; si < 5; ++si) {
    CHECK(surface[static_cast<std::size_t>(si)].lambda1 < surface[static_cast<std::size_t>(5 + si)].lambda1);
    CHECK(surface[static_cast<std::size_t>(5 + si)].lambda1 < surface[static_cast<std::size_t>(10 + si)].lambda1);
  }

  const auto again = sweep(sizes, {0.2, 0.4, 0.6}, sigmas, 0.05, 2000, 7);
  for (std::size_t k = 0; k < surface.size(); ++k) {
    CHECK(again[k].lambda0 == surface[k].lambda0);
    CHECK(again[k].lambda1 == surface[k].lambda1);
  }

  const auto partial = sweep(sizes, {0.3, 0.9}, {0.3, 0.9}, 0.0, 200, 1);
  CHECK(partial[0].feasible);
  CHECK_FALSE(partial[3].feasible);
  CHECK_THROWS_AS(sweep(sizes, {0.9}, {0.9}, 0.0, 200, 1), FeasibilityError);
}

TEST_CASE("prices_from_returns round-trips through log_returns") {
  const FactorParams p = uniform_params({4, 4}, 0.5, 0.5);
  const ReturnMatrix r = simulate_returns(p, 100, 3);
  const PriceTable prices = prices_from_returns(r, 0.01);
  CHECK(prices.n_dates() == 101);
  const ReturnMatrix back = log_returns(prices);
  CHECK((back.values - 0.01 * r.values).cwiseAbs().maxCoeff() <= 1e-12);
}
