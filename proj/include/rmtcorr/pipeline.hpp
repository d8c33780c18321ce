#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtcorr/errors.hpp"
#include "rmtcorr/factor_model.hpp"
#include "rmtcorr/ingest.hpp"
#include "rmtcorr/returns.hpp"

namespace rmtcorr {

struct ThresholdGrid {
  double lo = 0.0;
  double hi = 0.0;
  int points = 200;
};

struct AnalysisOptions {
  int bins = 50;
  double hist_lo = -1.0;
  double hist_hi = 1.0;
  std::optional<Eigen::Index> n_g;  // empty: count deviating eigenvalues
  double margin = 0.0;
  std::optional<ThresholdGrid> thresholds;  // empty: span the group entries
  int default_threshold_points = 200;
  bool count_singletons = false;
  std::uint64_t seed = 0;
  int top_modes = 4;
  bool export_matrices = true;
};

/// Run `fn`, rethrowing any library error as the same error type with the
/// stage name prefixed to its message.
template <typename Fn>
decltype(auto) run_stage(const std::string& stage, Fn&& fn);

/// Prices -> normalized returns, honouring the ingest options. Stocks dropped
/// for zero variance are appended to `dropped` when `drop_degenerate` is set.
struct PrepareOptions {
  int dt = 1;
  std::optional<std::pair<std::string, std::string>> period;
  std::optional<std::int64_t> sample;
  std::optional<std::int64_t> inject_missing;
  std::uint64_t seed = 0;
  bool drop_degenerate = false;
};

NormalizedReturns prepare_returns(const PriceTable& raw, const PrepareOptions& opts,
                                  std::vector<std::string>& dropped);

/// Full correlation analysis of `nr`, writing the figure data under
/// `out_dir`. Returns the results section of the run manifest.
nlohmann::json run_analysis(const NormalizedReturns& nr, const SectorMap& sectors,
                            const AnalysisOptions& opts, const std::filesystem::path& out_dir);

/// Surrogate-only run: shuffled spectrum and the MP reference curve.
nlohmann::json run_surrogate(const NormalizedReturns& nr, const AnalysisOptions& opts,
                             const std::filesystem::path& out_dir);

/// `k,lambda_sample,lambda_population,lambda_analytic,rel_error`; the
/// analytic column is empty where no closed form applies and rel_error is
/// measured against the analytic value when present, else the population one.
nlohmann::json write_analytic_comparison(const std::filesystem::path& path,
                                         const FactorParams& params, const NormalizedReturns& nr);

/// Every stock's sector is `label`.
SectorMap single_sector(const std::vector<std::string>& tickers, const std::string& label);

/// Write `json` pretty-printed to `path`.
void write_json(const std::filesystem::path& path, const nlohmann::json& json);

// ---------------------------------------------------------------------------

template <typename Fn>
decltype(auto) run_stage(const std::string& stage, Fn&& fn) {
  try {
    return std::forward<Fn>(fn)();
  } catch (const ValidationError& e) {
    throw ValidationError(stage + ": " + e.what());
  } catch (const RangeError& e) {
    throw RangeError(stage + ": " + e.what());
  } catch (const FeasibilityError& e) {
    throw FeasibilityError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  }
}

}  // namespace rmtcorr
