// rmtcorr: correlation-matrix analysis of stock returns and the two-factor
// market simulator. Every subcommand writes delimited data files plus a
// manifest.json recording the resolved configuration and input digests.

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rmtcorr/digest.hpp"
#include "rmtcorr/errors.hpp"
#include "rmtcorr/factor_model.hpp"
#include "rmtcorr/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rmtcorr;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitData = 3;
constexpr int kExitInfeasible = 4;
constexpr const char* kVersion = "1.0.0";

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("cannot parse " + what + " '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto stop = s.find(sep, start);
    out.push_back(s.substr(start, stop == std::string::npos ? std::string::npos : stop - start));
    if (stop == std::string::npos) return out;
    start = stop + 1;
  }
}

/// `lo:hi:n`
ThresholdGrid parse_grid(const std::string& spec, const std::string& what) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ValidationError(what + " must look like lo:hi:n");
  ThresholdGrid g{to_double(parts[0], what), to_double(parts[1], what),
                  static_cast<int>(to_double(parts[2], what))};
  if (g.points < 1 || g.lo > g.hi) throw ValidationError(what + " needs lo <= hi and n >= 1");
  return g;
}

std::vector<double> expand_grid(const ThresholdGrid& g) {
  if (g.points == 1) return {g.lo};
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(g.points, g.lo, g.hi);
  return {v.data(), v.data() + v.size()};
}

/// `KxN` (K sectors of N stocks) or a comma-separated list of sizes.
std::vector<Eigen::Index> parse_sizes(const std::string& spec) {
  std::vector<Eigen::Index> sizes;
  if (const auto x = spec.find('x'); x != std::string::npos) {
    const auto k = static_cast<Eigen::Index>(to_double(spec.substr(0, x), "--sizes"));
    const auto n = static_cast<Eigen::Index>(to_double(spec.substr(x + 1), "--sizes"));
    if (k < 1 || n < 1) throw ValidationError("--sizes needs positive counts");
    sizes.assign(static_cast<std::size_t>(k), n);
  } else {
    for (const auto& part : split(spec, ',')) {
      sizes.push_back(static_cast<Eigen::Index>(to_double(part, "--sizes")));
    }
  }
  return sizes;
}

struct AnalysisFlags {
  std::string out;
  std::uint64_t seed = 0;
  int bins = 50;
  std::string ng = "auto";
  double margin = 0.0;
  std::string thresholds;
  bool count_singletons = false;
  bool no_matrices = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--out", out, "Output directory")->required();
    cmd.add_option("--seed", seed, "Seed for every random step")->capture_default_str();
    cmd.add_option("--bins", bins, "Histogram bins over [-1, 1]")->capture_default_str();
    cmd.add_option("--ng", ng, "Group-mode count, or 'auto'")->capture_default_str();
    cmd.add_option("--margin", margin, "Relative slack above lambda_max when counting deviating modes")
        ->capture_default_str();
    cmd.add_option("--thresholds", thresholds, "Network threshold grid lo:hi:n (default: span of group entries, 200 points)");
    cmd.add_flag("--count-singletons", count_singletons, "Count isolated nodes as clusters");
    cmd.add_flag("--no-matrices", no_matrices, "Skip the decomposition matrix export");
  }

  AnalysisOptions resolve() const {
    AnalysisOptions o;
    o.bins = bins;
    o.seed = seed;
    o.margin = margin;
    o.count_singletons = count_singletons;
    o.export_matrices = !no_matrices;
    if (ng != "auto") {
      const double v = to_double(ng, "--ng");
      if (v < 0 || v != static_cast<double>(static_cast<Eigen::Index>(v))) {
        throw ValidationError("--ng must be a nonnegative integer or 'auto'");
      }
      o.n_g = static_cast<Eigen::Index>(v);
    }
    if (!thresholds.empty()) o.thresholds = parse_grid(thresholds, "--thresholds");
    return o;
  }

  json to_json() const {
    return {{"seed", seed},       {"bins", bins},
            {"ng", ng},           {"margin", margin},
            {"thresholds", thresholds.empty() ? "auto" : thresholds},
            {"count_singletons", count_singletons},
            {"export_matrices", !no_matrices}};
  }
};

struct PriceFlags {
  std::string prices;
  std::string sectors;
  int dt = 1;
  std::string period;
  std::string delimiter = ",";
  bool drop_degenerate = false;
  std::optional<std::int64_t> sample;
  std::optional<std::int64_t> inject_missing;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--prices", prices, "Price file with header date,ticker,close")->required();
    cmd.add_option("--sectors", sectors, "Sector file with header ticker,sector");
    cmd.add_option("--dt", dt, "Return horizon in trading days")->capture_default_str();
    cmd.add_option("--period", period, "Closed date range A:B");
    cmd.add_option("--delimiter", delimiter, "Field delimiter of the input files")->capture_default_str();
    cmd.add_flag("--drop-degenerate", drop_degenerate, "Drop zero-variance stocks instead of failing");
    cmd.add_option("--sample", sample, "Analyse a random subset of this many stocks");
    cmd.add_option("--inject-missing", inject_missing, "Replace this many random cells by the previous day's price");
  }

  char delim() const {
    if (delimiter == "\\t" || delimiter == "tab") return '\t';
    if (delimiter.size() != 1) throw ValidationError("--delimiter must be one character");
    return delimiter[0];
  }

  PrepareOptions resolve(std::uint64_t seed) const {
    PrepareOptions o;
    o.dt = dt;
    o.seed = seed;
    o.drop_degenerate = drop_degenerate;
    o.sample = sample;
    o.inject_missing = inject_missing;
    if (!period.empty()) {
      const auto parts = split(period, ':');
      if (parts.size() != 2) throw ValidationError("--period must look like A:B");
      o.period = {parts[0], parts[1]};
    }
    return o;
  }

  json to_json() const {
    return {{"dt", dt},
            {"period", period.empty() ? json(nullptr) : json(period)},
            {"delimiter", delimiter},
            {"drop_degenerate", drop_degenerate},
            {"sample", sample ? json(*sample) : json(nullptr)},
            {"inject_missing", inject_missing ? json(*inject_missing) : json(nullptr)}};
  }

  json inputs() const {
    json j = {{"prices", {{"path", prices}, {"sha256", sha256_file(prices)}}}};
    if (!sectors.empty()) j["sectors"] = {{"path", sectors}, {"sha256", sha256_file(sectors)}};
    return j;
  }
};

struct ModelFlags {
  std::string sizes = "10x20";
  double width = 0.05;
  Eigen::Index t_len = 2000;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--sizes", sizes, "Sector sizes: KxN or a comma list")->capture_default_str();
    cmd.add_option("--width", width, "Width of the uniform spread around gamma and sigma")->capture_default_str();
    cmd.add_option("--T", t_len, "Simulated series length")->capture_default_str();
  }
};

json manifest(const std::string& command, json config, json inputs, json results) {
  return {{"tool", "rmtcorr"},       {"version", kVersion},      {"command", command},
          {"config", std::move(config)}, {"inputs", std::move(inputs)}, {"results", std::move(results)}};
}

NormalizedReturns load_returns(const PriceFlags& pf, std::uint64_t seed,
                               std::vector<std::string>& dropped) {
  const PriceTable raw = run_stage("ingest", [&] { return read_price_table(pf.prices, pf.delim()); });
  NormalizedReturns nr = prepare_returns(raw, pf.resolve(seed), dropped);
  for (const auto& t : dropped) std::cerr << "rmtcorr: dropped zero-variance stock " << t << '\n';
  return nr;
}

SectorMap load_sectors(const PriceFlags& pf, const std::vector<std::string>& tickers) {
  if (pf.sectors.empty()) return single_sector(tickers, "ALL");
  return run_stage("ingest", [&] { return read_sector_map(pf.sectors, pf.delim()); });
}

void log_ng(const json& results) {
  const auto& d = results.at("decomposition");
  std::cerr << "rmtcorr: n_g = " << d.at("n_g").get<long>() << " (" << d.at("n_g_source").get<std::string>()
            << ")\n";
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Random-matrix analysis of stock return cross-correlations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  PriceFlags analyze_prices;
  AnalysisFlags analyze_flags;
  auto* analyze = app.add_subcommand("analyze", "Full pipeline on a price file");
  analyze_prices.add_to(*analyze);
  analyze_flags.add_to(*analyze);

  PriceFlags surrogate_prices;
  AnalysisFlags surrogate_flags;
  auto* surrogate = app.add_subcommand("surrogate", "Spectrum of the time-shuffled surrogate");
  surrogate_prices.add_to(*surrogate);
  surrogate_flags.add_to(*surrogate);

  ModelFlags simulate_model;
  AnalysisFlags simulate_flags;
  double gamma = 0.3;
  double sigma = 0.6;
  bool emit_prices = false;
  auto* simulate = app.add_subcommand("simulate", "Full pipeline on a simulated two-factor market");
  simulate_model.add_to(*simulate);
  simulate_flags.add_to(*simulate);
  simulate->add_option("--gamma", gamma, "Mean sector strength")->capture_default_str();
  simulate->add_option("--sigma", sigma, "Mean idiosyncratic strength")->capture_default_str();
  simulate->add_flag("--emit-prices", emit_prices, "Also write prices.csv and sectors.csv of the simulated market");

  ModelFlags sweep_model;
  std::string gamma_grid = "0.1:0.7:7";
  std::string sigma_grid = "0.1:0.7:7";
  std::string sweep_out;
  std::uint64_t sweep_seed = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Leading eigenvalues over a (gamma, sigma) grid");
  sweep_model.add_to(*sweep_cmd);
  sweep_cmd->add_option("--gamma-grid", gamma_grid, "lo:hi:n")->capture_default_str();
  sweep_cmd->add_option("--sigma-grid", sigma_grid, "lo:hi:n")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_seed, "Master seed")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (analyze->parsed()) {
    const AnalysisOptions opts = analyze_flags.resolve();
    std::vector<std::string> dropped;
    const NormalizedReturns nr = load_returns(analyze_prices, opts.seed, dropped);
    const SectorMap sectors = load_sectors(analyze_prices, nr.tickers);
    json config = analyze_flags.to_json();
    config.update(analyze_prices.to_json());
    const json inputs = analyze_prices.inputs();
    json results = run_analysis(nr, sectors, opts, analyze_flags.out);
    results["dropped"] = dropped;
    log_ng(results);
    write_json(fs::path(analyze_flags.out) / "manifest.json",
               manifest("analyze", config, inputs, results));
  } else if (surrogate->parsed()) {
    const AnalysisOptions opts = surrogate_flags.resolve();
    std::vector<std::string> dropped;
    const NormalizedReturns nr = load_returns(surrogate_prices, opts.seed, dropped);
    json config = surrogate_flags.to_json();
    config.update(surrogate_prices.to_json());
    json results = run_surrogate(nr, opts, surrogate_flags.out);
    results["dropped"] = dropped;
    write_json(fs::path(surrogate_flags.out) / "manifest.json",
               manifest("surrogate", config, surrogate_prices.inputs(), results));
  } else if (simulate->parsed()) {
    const AnalysisOptions opts = simulate_flags.resolve();
    const auto sizes = parse_sizes(simulate_model.sizes);
    const FactorParams params = run_stage("factor_model", [&] {
      return sample_params(sizes, gamma, sigma, simulate_model.width, opts.seed);
    });
    const ReturnMatrix r = run_stage("factor_model", [&] {
      return simulate_returns(params, simulate_model.t_len, opts.seed);
    });
    const NormalizedReturns nr = run_stage("returns", [&] { return normalize(r); });
    const fs::path out(simulate_flags.out);
    json results = run_analysis(nr, params.sector_map(), opts, out);
    log_ng(results);
    results["analytic"] = run_stage("factor_model", [&] {
      return write_analytic_comparison(out / "analytic_comparison.csv", params, nr);
    });
    results["files"]["analytic_comparison.csv"] = sha256_file(out / "analytic_comparison.csv");
    results["beta_sq_mean"] = params.beta.squaredNorm() / static_cast<double>(params.n_stocks());
    if (emit_prices) {
      const PriceTable prices = prices_from_returns(r);
      {
        std::ofstream p(out / "prices.csv", std::ios::binary);
        p << "date,ticker,close\n";
        for (Eigen::Index t = 0; t < prices.n_dates(); ++t) {
          for (Eigen::Index i = 0; i < prices.n_stocks(); ++i) {
            p << prices.dates[static_cast<std::size_t>(t)] << ','
              << prices.tickers[static_cast<std::size_t>(i)] << ','
              << fmt::format("{}", prices.prices(i, t)) << '\n';
          }
        }
        std::ofstream s(out / "sectors.csv", std::ios::binary);
        s << "ticker,sector\n";
        for (const auto& [ticker, sector] : params.sector_map().assignments) {
          s << ticker << ',' << sector << '\n';
        }
      }
      results["files"]["prices.csv"] = sha256_file(out / "prices.csv");
      results["files"]["sectors.csv"] = sha256_file(out / "sectors.csv");
    }
    json config = simulate_flags.to_json();
    config.update({{"sizes", sizes},
                   {"gamma", gamma},
                   {"sigma", sigma},
                   {"width", simulate_model.width},
                   {"T", simulate_model.t_len},
                   {"emit_prices", emit_prices}});
    write_json(out / "manifest.json", manifest("simulate", config, json::object(), results));
  } else if (sweep_cmd->parsed()) {
    const auto sizes = parse_sizes(sweep_model.sizes);
    const auto gammas = expand_grid(parse_grid(gamma_grid, "--gamma-grid"));
    const auto sigmas = expand_grid(parse_grid(sigma_grid, "--sigma-grid"));
    const auto surface = run_stage("factor_model", [&] {
      return rmtcorr::sweep(sizes, gammas, sigmas, sweep_model.width, sweep_model.t_len, sweep_seed);
    });
    const fs::path out(sweep_out);
    fs::create_directories(out);
    {
      std::ofstream s(out / "sweep.csv", std::ios::binary);
      write_sweep(s, surface);
      std::ofstream f(out / "feasibility.csv", std::ios::binary);
      write_feasibility(f, surface);
    }
    const auto feasible = std::count_if(surface.begin(), surface.end(),
                                        [](const SweepPoint& p) { return p.feasible; });
    const json results = {{"grid_points", surface.size()},
                          {"feasible_points", feasible},
                          {"files",
                           {{"sweep.csv", sha256_file(out / "sweep.csv")},
                            {"feasibility.csv", sha256_file(out / "feasibility.csv")}}}};
    const json config = {{"sizes", sizes},
                         {"gamma_grid", gamma_grid},
                         {"sigma_grid", sigma_grid},
                         {"width", sweep_model.width},
                         {"T", sweep_model.t_len},
                         {"seed", sweep_seed}};
    write_json(out / "manifest.json", manifest("sweep", config, json::object(), results));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const FeasibilityError& e) {
    std::cerr << "rmtcorr: infeasible configuration: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    std::cerr << "rmtcorr: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const RangeError& e) {
    std::cerr << "rmtcorr: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DataError& e) {
    std::cerr << "rmtcorr: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "rmtcorr: error: " << e.what() << '\n';
    return 1;
  }
}
