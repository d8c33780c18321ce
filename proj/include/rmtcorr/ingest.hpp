#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rmtcorr {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Daily closing prices of N stocks over T_raw trading days.
///
/// Rows are stocks, columns are dates. `observed(i, t)` is false where no
/// price was reported; the corresponding `prices` cell is NaN until the
/// table is forward-filled, after which it carries the filled value while
/// the mask keeps recording what was actually observed.
struct PriceTable {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;
  Eigen::MatrixXd prices;
  BoolArray observed;

  Eigen::Index n_stocks() const { return prices.rows(); }
  Eigen::Index n_dates() const { return prices.cols(); }

  /// True when every cell holds a usable price (either observed or filled).
  bool complete() const { return prices.allFinite(); }
};

/// Ticker -> sector label.
struct SectorMap {
  std::map<std::string, std::string> assignments;

  /// Throws ValidationError if any ticker lacks a sector.
  void check_covers(const std::vector<std::string>& tickers) const;
  const std::string& sector_of(const std::string& ticker) const;
};

struct PriceRecord {
  std::string date;
  std::string ticker;
  double close = 0.0;
};

/// Assemble the dates x tickers grid. Tickers keep first-appearance order,
/// dates are sorted ascending (labels compare as strings, so ISO-8601 sorts
/// chronologically).
PriceTable parse_price_table(const std::vector<PriceRecord>& records);

/// Read `date,ticker,close` delimited text (header required).
PriceTable read_price_table(std::istream& in, char delimiter = ',');
PriceTable read_price_table(const std::string& path, char delimiter = ',');

/// Read `ticker,sector` delimited text (header required).
SectorMap read_sector_map(std::istream& in, char delimiter = ',');
SectorMap read_sector_map(const std::string& path, char delimiter = ',');

/// Carry the last observed price forward over unobserved cells.
PriceTable forward_fill(const PriceTable& table);

/// Replace `count` cells, chosen uniformly without replacement from all
/// columns but the first, by the preceding day's value and mark them
/// unobserved. Cells are processed left to right so a run of injected cells
/// repeats the last genuine price.
PriceTable inject_missing(const PriceTable& table, std::int64_t count, std::uint64_t seed);

/// Uniform random n-subset of stocks; subset keeps the source order.
PriceTable sample_universe(const PriceTable& table, std::int64_t n, std::uint64_t seed);

/// Restrict to dates in the closed range [start, end].
PriceTable slice_period(const PriceTable& table, const std::string& start, const std::string& end);

/// Keep only the listed rows, in the given order.
PriceTable select_stocks(const PriceTable& table, const std::vector<Eigen::Index>& rows);

}  // namespace rmtcorr
