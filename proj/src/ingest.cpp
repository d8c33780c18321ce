#include "rmtcorr/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "csv.hpp"
#include "rmtcorr/errors.hpp"
#include "rmtcorr/random.hpp"

namespace rmtcorr {

namespace {

double parse_close(const std::string& field, std::size_t row) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(row, "cannot parse close price '" + field + "'");
  }
  return value;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                   const std::string& kind) {
  if (got != want) {
    std::string expected;
    for (const auto& w : want) expected += (expected.empty() ? "" : ",") + w;
    throw ParseError(0, kind + " header must be '" + expected + "'");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

void SectorMap::check_covers(const std::vector<std::string>& tickers) const {
  for (const auto& t : tickers) {
    if (!assignments.contains(t)) throw ValidationError("ticker '" + t + "' has no sector");
  }
}

const std::string& SectorMap::sector_of(const std::string& ticker) const {
  auto it = assignments.find(ticker);
  if (it == assignments.end()) throw ValidationError("ticker '" + ticker + "' has no sector");
  return it->second;
}

PriceTable parse_price_table(const std::vector<PriceRecord>& records) {
  std::vector<std::string> tickers;
  std::unordered_map<std::string, Eigen::Index> ticker_index;
  std::set<std::string> date_set;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.date.empty() || rec.ticker.empty()) throw ParseError(r + 1, "empty date or ticker");
    if (!std::isfinite(rec.close) || rec.close <= 0.0) {
      throw ValidationError("non-positive or non-finite price for ticker '" + rec.ticker +
                            "' on " + rec.date);
    }
    if (ticker_index.emplace(rec.ticker, static_cast<Eigen::Index>(tickers.size())).second) {
      tickers.push_back(rec.ticker);
    }
    date_set.insert(rec.date);
  }
  if (date_set.size() < 2) {
    throw InsufficientDataError("price table needs at least 2 distinct dates, got " +
                                std::to_string(date_set.size()));
  }

  PriceTable table;
  table.tickers = std::move(tickers);
  table.dates.assign(date_set.begin(), date_set.end());
  std::unordered_map<std::string, Eigen::Index> date_index;
  for (std::size_t d = 0; d < table.dates.size(); ++d) {
    date_index.emplace(table.dates[d], static_cast<Eigen::Index>(d));
  }

  const auto n = static_cast<Eigen::Index>(table.tickers.size());
  const auto t = static_cast<Eigen::Index>(table.dates.size());
  table.prices = Eigen::MatrixXd::Constant(n, t, std::numeric_limits<double>::quiet_NaN());
  table.observed = BoolArray::Constant(n, t, false);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const Eigen::Index i = ticker_index.at(rec.ticker);
    const Eigen::Index j = date_index.at(rec.date);
    if (table.observed(i, j)) {
      throw ParseError(r + 1, "duplicate observation for ticker '" + rec.ticker + "' on " +
                                  rec.date);
    }
    table.prices(i, j) = rec.close;
    table.observed(i, j) = true;
  }
  return table;
}

PriceTable read_price_table(std::istream& in, char delimiter) {
  detail::CsvReader reader(in, delimiter);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw InsufficientDataError("price file is empty");
  expect_header(fields, {"date", "ticker", "close"}, "price file");

  std::vector<PriceRecord> records;
  while (reader.next(fields)) {
    const std::size_t row = reader.row();
    if (fields.size() != 3) {
      throw ParseError(row, "expected 3 fields, got " + std::to_string(fields.size()));
    }
    records.push_back({fields[0], fields[1], parse_close(fields[2], row)});
  }
  return parse_price_table(records);
}

PriceTable read_price_table(const std::string& path, char delimiter) {
  auto in = open_input(path);
  return read_price_table(in, delimiter);
}

SectorMap read_sector_map(std::istream& in, char delimiter) {
  detail::CsvReader reader(in, delimiter);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw DataError("sector file is empty");
  expect_header(fields, {"ticker", "sector"}, "sector file");

  SectorMap map;
  while (reader.next(fields)) {
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(reader.row(), "expected 'ticker,sector'");
    }
    if (!map.assignments.emplace(fields[0], fields[1]).second) {
      throw ParseError(reader.row(), "duplicate ticker '" + fields[0] + "'");
    }
  }
  return map;
}

SectorMap read_sector_map(const std::string& path, char delimiter) {
  auto in = open_input(path);
  return read_sector_map(in, delimiter);
}

PriceTable forward_fill(const PriceTable& table) {
  PriceTable out = table;
  for (Eigen::Index i = 0; i < out.n_stocks(); ++i) {
    if (!out.observed(i, 0) && !std::isfinite(out.prices(i, 0))) {
      throw LeadingGapError(out.tickers[static_cast<std::size_t>(i)]);
    }
    for (Eigen::Index t = 1; t < out.n_dates(); ++t) {
      if (!out.observed(i, t)) out.prices(i, t) = out.prices(i, t - 1);
    }
  }
  return out;
}

PriceTable inject_missing(const PriceTable& table, std::int64_t count, std::uint64_t seed) {
  if (!table.observed.all()) {
    throw MissingDataError("inject_missing requires a fully observed table");
  }
  const Eigen::Index n = table.n_stocks();
  const Eigen::Index eligible = n * (table.n_dates() - 1);
  if (count < 0 || count > eligible) {
    throw RangeError("cannot inject " + std::to_string(count) + " missing cells; only " +
                     std::to_string(eligible) + " are eligible");
  }

  // Eligible cells enumerated column-major from column 1, so the sorted
  // sample visits each row's cells left to right.
  std::vector<Eigen::Index> cells(static_cast<std::size_t>(eligible));
  std::iota(cells.begin(), cells.end(), Eigen::Index{0});
  std::vector<Eigen::Index> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  auto engine = make_stream(seed);
  std::sample(cells.begin(), cells.end(), std::back_inserter(chosen), count, engine);

  PriceTable out = table;
  for (Eigen::Index cell : chosen) {
    const Eigen::Index i = cell % n;
    const Eigen::Index t = cell / n + 1;
    out.prices(i, t) = out.prices(i, t - 1);
    out.observed(i, t) = false;
  }
  return out;
}

PriceTable select_stocks(const PriceTable& table, const std::vector<Eigen::Index>& rows) {
  PriceTable out;
  out.dates = table.dates;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.prices.resize(n, table.n_dates());
  out.observed.resize(n, table.n_dates());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = rows[static_cast<std::size_t>(k)];
    if (i < 0 || i >= table.n_stocks()) throw RangeError("stock index out of range");
    out.tickers.push_back(table.tickers[static_cast<std::size_t>(i)]);
    out.prices.row(k) = table.prices.row(i);
    out.observed.row(k) = table.observed.row(i);
  }
  return out;
}

PriceTable sample_universe(const PriceTable& table, std::int64_t n, std::uint64_t seed) {
  if (n < 1 || n > table.n_stocks()) {
    throw RangeError("cannot sample " + std::to_string(n) + " of " +
                     std::to_string(table.n_stocks()) + " stocks");
  }
  std::vector<Eigen::Index> all(static_cast<std::size_t>(table.n_stocks()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::vector<Eigen::Index> rows;
  rows.reserve(static_cast<std::size_t>(n));
  auto engine = make_stream(seed);
  // std::sample is a selection sample here (forward iterators), so `rows`
  // comes out in source order.
  std::sample(all.begin(), all.end(), std::back_inserter(rows), n, engine);
  return select_stocks(table, rows);
}

PriceTable slice_period(const PriceTable& table, const std::string& start, const std::string& end) {
  if (end < start) throw InsufficientDataError("period end " + end + " precedes start " + start);
  const auto lo = std::lower_bound(table.dates.begin(), table.dates.end(), start);
  const auto hi = std::upper_bound(table.dates.begin(), table.dates.end(), end);
  const auto count = std::distance(lo, hi);
  if (count < 2) {
    throw InsufficientDataError("period " + start + ":" + end + " contains " +
                                std::to_string(count) + " dates; need at least 2");
  }
  const auto first = std::distance(table.dates.begin(), lo);
  PriceTable out;
  out.tickers = table.tickers;
  out.dates.assign(lo, hi);
  out.prices = table.prices.middleCols(first, count);
  out.observed = table.observed.middleCols(first, count);
  return out;
}

}  // namespace rmtcorr
