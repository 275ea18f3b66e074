#pragma once

// Price tables to log-return matrices.
//
// Two CSV layouts are accepted and told apart by the header:
//   long:  date,ticker,close[,volume]
//   wide:  date,T1,T2,...
// Dates are kept as opaque strings and ordered lexicographically, which is
// chronological for ISO-8601 dates.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specboot/linalg.hpp"

namespace specboot {

struct PriceTable {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;  // strictly increasing
  Matrix prices;                   // dates x tickers, all > 0
  std::optional<Matrix> volumes;   // dates x tickers, long layout only
  /// Tickers removed because of gaps in the date range.
  std::vector<std::string> dropped;

  Eigen::Index rows() const noexcept { return prices.rows(); }
  Eigen::Index cols() const noexcept { return prices.cols(); }
};

/// Parses either layout. Tickers missing a price on any date are dropped and
/// listed in `dropped`. Throws ParseError (with line number) for malformed
/// rows or non-positive prices, DegenerateInputError for an empty table.
PriceTable parse_prices(std::istream& in);
PriceTable load_prices(const std::string& path);

struct ReturnMatrix {
  std::vector<std::string> tickers;
  Matrix values;  // periods x tickers

  Eigen::Index n() const noexcept { return values.rows(); }
  Eigen::Index p() const noexcept { return values.cols(); }
};

/// Non-overlapping windows: r_t = log(P[(t+1) period] / P[t period]) for
/// t = 0 .. floor((dates - 1) / period) - 1. Throws ArgumentError for
/// period < 1 and DegenerateInputError when fewer than 2 periods fit.
ReturnMatrix to_log_returns(const PriceTable& table, Eigen::Index period = 10);

/// Top `top` tickers by mean volume, descending, ties broken by symbol.
/// Throws ArgumentError when the table has no volume column.
std::vector<std::string> rank_by_volume(const PriceTable& table, std::size_t top);

/// Keeps only the listed tickers, in the given order.
PriceTable select_tickers(const PriceTable& table, const std::vector<std::string>& tickers);

/// Numeric matrix with a header row of column names (e.g. a saved return
/// matrix). Throws ParseError on malformed rows.
ReturnMatrix load_matrix_csv(const std::string& path);
ReturnMatrix parse_matrix_csv(std::istream& in);

}  // namespace specboot
