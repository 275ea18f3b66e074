#include "specboot/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "specboot/errors.hpp"

namespace specboot {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_missing(const std::string& cell) {
  const std::string c = lower(cell);
  return c.empty() || c == "na" || c == "nan" || c == "null";
}

double parse_number(const std::string& cell, std::size_t line, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse " + what + " '" + cell + "'",
                     line);
  }
  return v;
}

// Reads non-blank, non-comment lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    lines.emplace_back(number, line);
  }
  return lines;
}

struct Cell {
  double close = 0.0;
  double volume = 0.0;
};

PriceTable assemble(std::map<std::string, std::map<std::string, Cell>> by_ticker,
                    const std::vector<std::string>& ticker_order, bool has_volume) {
  std::vector<std::string> dates;
  {
    std::map<std::string, int> all;
    for (const auto& [t, rows] : by_ticker)
      for (const auto& [d, c] : rows) all[d] = 0;
    for (const auto& [d, z] : all) dates.push_back(d);
  }
  PriceTable table;
  table.dates = dates;
  for (const auto& t : ticker_order) {
    if (by_ticker[t].size() == dates.size()) {
      table.tickers.push_back(t);
    } else {
      table.dropped.push_back(t);
    }
  }
  if (dates.empty() || table.tickers.empty()) {
    throw DegenerateInputError("price table is empty after dropping incomplete tickers");
  }
  const auto rows = static_cast<Eigen::Index>(dates.size());
  const auto cols = static_cast<Eigen::Index>(table.tickers.size());
  table.prices.resize(rows, cols);
  if (has_volume) table.volumes = Matrix(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto& series = by_ticker[table.tickers[static_cast<std::size_t>(c)]];
    Eigen::Index r = 0;
    for (const auto& [d, cell] : series) {
      table.prices(r, c) = cell.close;
      if (has_volume) (*table.volumes)(r, c) = cell.volume;
      ++r;
    }
  }
  return table;
}

}  // namespace

PriceTable parse_prices(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw DegenerateInputError("price file has no header");
  const auto header = split(lines.front().second);
  std::vector<std::string> names;
  for (const auto& h : header) names.push_back(lower(h));
  if (names.empty() || names[0] != "date") {
    throw ParseError("line " + std::to_string(lines.front().first) +
                         ": header must start with 'date'",
                     lines.front().first);
  }

  std::map<std::string, std::map<std::string, Cell>> by_ticker;
  std::vector<std::string> order;

  const auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
  };
  const auto ticker_col = col("ticker");
  const auto close_col = col("close");
  const bool long_form = ticker_col && close_col;

  if (long_form) {
    const auto volume_col = col("volume");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto& [number, text] = lines[i];
      const auto cells = split(text);
      if (cells.size() != header.size()) {
        throw ParseError("line " + std::to_string(number) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(cells.size()),
                         number);
      }
      const std::string& ticker = cells[*ticker_col];
      if (ticker.empty()) throw ParseError("line " + std::to_string(number) + ": empty ticker", number);
      if (!by_ticker.contains(ticker)) order.push_back(ticker);
      auto& series = by_ticker[ticker];
      if (is_missing(cells[*close_col])) continue;
      Cell cell;
      cell.close = parse_number(cells[*close_col], number, "close");
      if (!(cell.close > 0.0)) {
        throw ParseError("line " + std::to_string(number) + ": price must be positive", number);
      }
      if (volume_col) {
        cell.volume = is_missing(cells[*volume_col])
                          ? 0.0
                          : parse_number(cells[*volume_col], number, "volume");
      }
      if (!series.emplace(cells[0], cell).second) {
        throw ParseError("line " + std::to_string(number) + ": duplicate row for " + ticker +
                             " on " + cells[0],
                         number);
      }
    }
    return assemble(std::move(by_ticker), order, volume_col.has_value());
  }

  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw ParseError("empty ticker name in header", lines.front().first);
    order.push_back(header[c]);
    by_ticker[header[c]];
  }
  if (order.empty()) throw DegenerateInputError("price file has no ticker columns");
  std::map<std::string, std::size_t> seen_dates;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, text] = lines[i];
    const auto cells = split(text);
    if (cells.size() != header.size()) {
      throw ParseError("line " + std::to_string(number) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(cells.size()),
                       number);
    }
    if (!seen_dates.emplace(cells[0], number).second) {
      throw ParseError("line " + std::to_string(number) + ": duplicate date " + cells[0], number);
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (is_missing(cells[c])) continue;
      const double v = parse_number(cells[c], number, "price");
      if (!(v > 0.0)) {
        throw ParseError("line " + std::to_string(number) + ": price must be positive", number);
      }
      by_ticker[header[c]][cells[0]] = Cell{v, 0.0};
    }
  }
  return assemble(std::move(by_ticker), order, false);
}

PriceTable load_prices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return parse_prices(in);
}

ReturnMatrix to_log_returns(const PriceTable& table, Eigen::Index period) {
  if (period < 1) throw ArgumentError("period must be >= 1");
  const Eigen::Index periods = (table.rows() - 1) / period;
  if (periods < 2) {
    throw DegenerateInputError("need at least " + std::to_string(2 * period + 1) +
                               " dates for two return periods, have " +
                               std::to_string(table.rows()));
  }
  ReturnMatrix out;
  out.tickers = table.tickers;
  out.values.resize(periods, table.cols());
  for (Eigen::Index t = 0; t < periods; ++t) {
    out.values.row(t) =
        (table.prices.row((t + 1) * period).array() / table.prices.row(t * period).array()).log();
  }
  return out;
}

std::vector<std::string> rank_by_volume(const PriceTable& table, std::size_t top) {
  if (!table.volumes) throw ArgumentError("price table has no volume column");
  std::vector<std::size_t> idx(table.tickers.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const Vector mean = table.volumes->colwise().mean().transpose();
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double va = mean[static_cast<Eigen::Index>(a)];
    const double vb = mean[static_cast<Eigen::Index>(b)];
    if (va != vb) return va > vb;
    return table.tickers[a] < table.tickers[b];
  });
  idx.resize(std::min(top, idx.size()));
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(table.tickers[i]);
  return out;
}

PriceTable select_tickers(const PriceTable& table, const std::vector<std::string>& tickers) {
  PriceTable out;
  out.dates = table.dates;
  out.tickers = tickers;
  out.prices.resize(table.rows(), static_cast<Eigen::Index>(tickers.size()));
  if (table.volumes) out.volumes = Matrix(table.rows(), static_cast<Eigen::Index>(tickers.size()));
  for (std::size_t c = 0; c < tickers.size(); ++c) {
    auto it = std::find(table.tickers.begin(), table.tickers.end(), tickers[c]);
    if (it == table.tickers.end()) throw ArgumentError("unknown ticker " + tickers[c]);
    const auto src = static_cast<Eigen::Index>(it - table.tickers.begin());
    out.prices.col(static_cast<Eigen::Index>(c)) = table.prices.col(src);
    if (table.volumes) out.volumes->col(static_cast<Eigen::Index>(c)) = table.volumes->col(src);
  }
  return out;
}

ReturnMatrix parse_matrix_csv(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw DegenerateInputError("matrix file is empty");
  ReturnMatrix out;
  out.tickers = split(lines.front().second);
  const std::size_t p = out.tickers.size();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, text] = lines[i];
    const auto cells = split(text);
    if (cells.size() != p) {
      throw ParseError("line " + std::to_string(number) + ": expected " + std::to_string(p) +
                           " fields, got " + std::to_string(cells.size()),
                       number);
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, number, "value"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DegenerateInputError("matrix file has no data rows");
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < p; ++j)
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

ReturnMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return parse_matrix_csv(in);
}

}  // namespace specboot
