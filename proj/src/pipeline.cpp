#include "rmtcorr/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "format.hpp"
#include "rmtcorr/correlation.hpp"
#include "rmtcorr/decompose.hpp"
#include "rmtcorr/digest.hpp"
#include "rmtcorr/network.hpp"
#include "rmtcorr/spectrum.hpp"

namespace rmtcorr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kMpCurvePoints = 400;
constexpr Eigen::Index kReportedEigenvalues = 20;

/// Collects output files in write order and records their digests.
class Bundle {
 public:
  explicit Bundle(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    const fs::path path = dir_ / name;
    fs::create_directories(path.parent_path());
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw DataError("cannot write '" + path.string() + "'");
      writer(out);
      if (!out) throw DataError("failed writing '" + path.string() + "'");
    }
    files_[name] = sha256_file(path);
  }

  json files() const { return files_; }

 private:
  fs::path dir_;
  json files_ = json::object();
};

json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

double fraction_inside(const Eigen::VectorXd& eigenvalues, const MpLaw& law, double widen) {
  const double lo = law.lambda_min * (1.0 - widen);
  const double hi = law.lambda_max * (1.0 + widen);
  const auto inside = (eigenvalues.array() >= lo && eigenvalues.array() <= hi).count();
  return static_cast<double>(inside) / static_cast<double>(eigenvalues.size());
}

}  // namespace

SectorMap single_sector(const std::vector<std::string>& tickers, const std::string& label) {
  SectorMap map;
  for (const auto& t : tickers) map.assignments.emplace(t, label);
  return map;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

NormalizedReturns prepare_returns(const PriceTable& raw, const PrepareOptions& opts,
                                  std::vector<std::string>& dropped) {
  PriceTable table = raw;
  if (opts.period) {
    table = run_stage("ingest", [&] {
      return slice_period(table, opts.period->first, opts.period->second);
    });
  }
  if (opts.sample) {
    table = run_stage("ingest", [&] { return sample_universe(table, *opts.sample, opts.seed); });
  }
  if (opts.inject_missing) {
    table = run_stage("ingest", [&] { return inject_missing(table, *opts.inject_missing, opts.seed); });
  }
  table = run_stage("ingest", [&] { return forward_fill(table); });
  ReturnMatrix r = run_stage("returns", [&] { return log_returns(table, opts.dt); });
  if (opts.drop_degenerate) {
    const auto degenerate = degenerate_tickers(r);
    if (!degenerate.empty()) {
      dropped.insert(dropped.end(), degenerate.begin(), degenerate.end());
      r = drop_tickers(r, degenerate);
    }
  }
  return run_stage("returns", [&] { return normalize(r); });
}

json run_analysis(const NormalizedReturns& nr, const SectorMap& sectors,
                  const AnalysisOptions& opts, const fs::path& out_dir) {
  Bundle bundle(out_dir);
  json results;
  results["n_stocks"] = nr.n_stocks();
  results["n_times"] = nr.n_times();
  results["source_digest"] = sha256_matrix(nr.values);

  run_stage("sectors", [&] { sectors.check_covers(nr.tickers); });

  const CorrMatrix c = run_stage("correlation", [&] { return correlation_matrix(nr); });
  const Histogram elements = run_stage("correlation", [&] {
    return element_histogram(c, opts.bins, opts.hist_lo, opts.hist_hi);
  });
  bundle.write("element_histogram.csv", [&](std::ostream& o) { write_histogram(o, elements); });
  results["offdiag_mean"] = offdiag_mean(c);
  results["histogram_overflow"] = elements.overflow;

  const Spectrum s = run_stage("spectrum", [&] { return eigendecompose(c); });
  const MpLaw law = run_stage("spectrum", [&] { return mp_bounds(s.q()); });
  const auto deviating = deviating_eigenvalues(s, law, opts.margin);
  bundle.write("spectrum.csv", [&](std::ostream& o) { write_spectrum(o, s); });
  bundle.write("mp_density.csv", [&](std::ostream& o) {
    write_mp_curve(o, law, 0.0, 1.25 * law.lambda_max, kMpCurvePoints);
  });
  results["q"] = s.q();
  results["mp"] = {{"lambda_min", law.lambda_min}, {"lambda_max", law.lambda_max}};
  results["lambda0"] = s.eigenvalues(0);
  results["lambda0_over_lambda_max"] = s.eigenvalues(0) / law.lambda_max;
  results["eigenvalues_top"] = vector_json(s.eigenvalues.head(std::min(kReportedEigenvalues, s.size())));
  results["deviating_count"] = deviating.size();

  const Spectrum surrogate = run_stage("surrogate", [&] {
    return eigendecompose(shuffle_surrogate(nr, opts.seed));
  });
  bundle.write("surrogate_spectrum.csv", [&](std::ostream& o) { write_spectrum(o, surrogate); });
  results["surrogate"] = {{"seed", opts.seed},
                          {"lambda_max", surrogate.eigenvalues(0)},
                          {"lambda_min", surrogate.eigenvalues(surrogate.size() - 1)},
                          {"fraction_inside_mp", fraction_inside(surrogate.eigenvalues, law, 0.0)}};

  const Eigen::Index modes = std::min<Eigen::Index>(opts.top_modes, s.size());
  for (Eigen::Index k = 0; k < modes; ++k) {
    const auto report = run_stage("spectrum", [&] { return eigenvector_report(s, sectors, k); });
    bundle.write(fmt::format("eigenvector_{}.csv", k),
                 [&](std::ostream& o) { write_eigenvector_report(o, report); });
  }

  const Eigen::Index n_g = opts.n_g ? *opts.n_g : auto_ng(s, law, opts.margin);
  const ModeDecomposition d = run_stage("decompose", [&] { return decompose(s, n_g); });
  const ComponentHistograms hists = run_stage("decompose", [&] {
    return component_histograms(d, opts.bins, opts.hist_lo, opts.hist_hi);
  });
  bundle.write("hist_market.csv", [&](std::ostream& o) { write_histogram(o, hists.market); });
  bundle.write("hist_group.csv", [&](std::ostream& o) { write_histogram(o, hists.group); });
  bundle.write("hist_random.csv", [&](std::ostream& o) { write_histogram(o, hists.random); });
  if (opts.export_matrices) {
    bundle.write("decomposition/market.csv", [&](std::ostream& o) { write_matrix(o, nr.tickers, d.market); });
    bundle.write("decomposition/group.csv", [&](std::ostream& o) { write_matrix(o, nr.tickers, d.group); });
    bundle.write("decomposition/random.csv", [&](std::ostream& o) { write_matrix(o, nr.tickers, d.random); });
  }
  results["decomposition"] = {
      {"n_g", n_g},
      {"n_g_source", opts.n_g ? "explicit" : "auto"},
      {"margin", opts.margin},
      {"lambda_market", s.eigenvalues(0)},
      {"lambda_group", vector_json(s.eigenvalues.segment(1, n_g))},
      {"trace_market", d.market.trace()},
      {"trace_group", d.group.trace()},
      {"trace_random", d.random.trace()},
      {"max_abs_residual", (d.sum() - c.entries).cwiseAbs().maxCoeff()}};

  std::vector<double> thresholds;
  if (opts.thresholds) {
    if (opts.thresholds->points < 1 || opts.thresholds->lo > opts.thresholds->hi) {
      throw RangeError("network: threshold grid must satisfy lo <= hi and n >= 1");
    }
    Eigen::VectorXd grid = Eigen::VectorXd::Constant(1, opts.thresholds->lo);
    if (opts.thresholds->points > 1) {
      grid = Eigen::VectorXd::LinSpaced(opts.thresholds->points, opts.thresholds->lo,
                                        opts.thresholds->hi);
    }
    thresholds.assign(grid.data(), grid.data() + grid.size());
  } else {
    thresholds = run_stage("network", [&] {
      return default_thresholds(d.group, opts.default_threshold_points);
    });
  }
  const ClusterScan scan = run_stage("network", [&] {
    return cluster_scan(d.group, thresholds, opts.count_singletons);
  });
  const double c_star = select_threshold(scan);
  const AdjacencyMatrix a = run_stage("network", [&] {
    return threshold_adjacency(d.group, c_star, nr.tickers);
  });
  const auto clusters = run_stage("network", [&] {
    return network_report(a, sectors, opts.count_singletons);
  });
  bundle.write("cluster_scan.csv", [&](std::ostream& o) { write_cluster_scan(o, scan); });
  bundle.write("edges.csv", [&](std::ostream& o) { write_edge_list(o, a, d.group); });
  bundle.write("clusters.csv", [&](std::ostream& o) { write_cluster_report(o, clusters); });
  json cluster_summary = json::array();
  for (const auto& r : clusters) {
    cluster_summary.push_back(
        {{"size", r.size()}, {"edges", r.edges}, {"dominant_sector", r.dominant_sector},
         {"purity", r.purity}});
  }
  results["network"] = {{"c_star", c_star},
                        {"count_singletons", opts.count_singletons},
                        {"clusters", clusters.size()},
                        {"nodes", a.node_count()},
                        {"edges", a.edge_count()},
                        {"cluster_summary", cluster_summary}};
  results["files"] = bundle.files();
  return results;
}

json run_surrogate(const NormalizedReturns& nr, const AnalysisOptions& opts,
                   const fs::path& out_dir) {
  Bundle bundle(out_dir);
  const Spectrum s = run_stage("surrogate", [&] {
    return eigendecompose(shuffle_surrogate(nr, opts.seed));
  });
  const MpLaw law = run_stage("spectrum", [&] { return mp_bounds(s.q()); });
  bundle.write("surrogate_spectrum.csv", [&](std::ostream& o) { write_spectrum(o, s); });
  bundle.write("mp_density.csv", [&](std::ostream& o) {
    write_mp_curve(o, law, 0.0, 1.25 * law.lambda_max, kMpCurvePoints);
  });
  const Eigen::VectorXd iprs = ipr_all(s);
  return {{"n_stocks", nr.n_stocks()},
          {"n_times", nr.n_times()},
          {"q", s.q()},
          {"seed", opts.seed},
          {"source_digest", sha256_matrix(nr.values)},
          {"mp", {{"lambda_min", law.lambda_min}, {"lambda_max", law.lambda_max}}},
          {"lambda_max_observed", s.eigenvalues(0)},
          {"lambda_min_observed", s.eigenvalues(s.size() - 1)},
          {"fraction_inside_mp", fraction_inside(s.eigenvalues, law, 0.0)},
          {"fraction_inside_mp_widened_5pct", fraction_inside(s.eigenvalues, law, 0.05)},
          {"mean_ipr", iprs.mean()},
          {"files", bundle.files()}};
}

json write_analytic_comparison(const fs::path& path, const FactorParams& params,
                               const NormalizedReturns& nr) {
  const Eigen::Index n = params.n_stocks();
  const Eigen::Index k_large = params.n_sectors();
  const Spectrum sample = eigendecompose(correlation_matrix(nr));
  const Spectrum population = eigendecompose(population_correlation(params));

  // Closed forms: the exact block spectrum without a market factor, or the
  // leading-eigenvalue scalings with one.
  std::vector<std::optional<double>> analytic(static_cast<std::size_t>(n));
  const bool no_market = params.beta.cwiseAbs().maxCoeff() < 1e-12;
  if (no_market) {
    std::vector<double> gammas;
    Eigen::Index offset = 0;
    for (auto size : params.sector_sizes) {
      gammas.push_back(params.gamma.segment(offset, size).mean());
      offset += size;
    }
    const Eigen::VectorXd all = analytic_spectrum_no_market(params.sector_sizes, gammas).expanded();
    for (Eigen::Index k = 0; k < n; ++k) analytic[static_cast<std::size_t>(k)] = all(k);
  } else {
    const double beta_sq = params.beta.squaredNorm() / static_cast<double>(n);
    const double gamma_sq = params.gamma.squaredNorm() / static_cast<double>(n);
    const ExtremesPrediction pred =
        analytic_extremes(std::sqrt(beta_sq), params.sector_sizes, std::sqrt(gamma_sq));
    analytic[0] = pred.lambda0;
    if (n > 1) analytic[1] = pred.lambda1;
    for (Eigen::Index k = k_large; k < n; ++k) analytic[static_cast<std::size_t>(k)] = pred.bulk;
  }

  double max_large_error = 0.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "k,lambda_sample,lambda_population,lambda_analytic,rel_error\n";
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& a = analytic[static_cast<std::size_t>(k)];
    const double reference = a ? *a : population.eigenvalues(k);
    const double rel = std::abs(sample.eigenvalues(k) - reference) / std::abs(reference);
    if (k < k_large && a) max_large_error = std::max(max_large_error, rel);
    out << k << ',' << detail::num(sample.eigenvalues(k)) << ','
        << detail::num(population.eigenvalues(k)) << ',' << (a ? detail::num(*a) : "") << ','
        << detail::num(rel) << '\n';
  }
  return {{"no_market", no_market},
          {"large_eigenvalues", k_large},
          {"max_rel_error_large_vs_analytic", max_large_error},
          {"lambda0_sample", sample.eigenvalues(0)},
          {"lambda0_population", population.eigenvalues(0)},
          {"lambda1_sample", n > 1 ? sample.eigenvalues(1) : 0.0},
          {"lambda1_population", n > 1 ? population.eigenvalues(1) : 0.0}};
}

}  // namespace rmtcorr
