#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "specboot/errors.hpp"
#include "specboot/ingest.hpp"
#include "specboot/streams.hpp"

namespace specboot {
namespace {

PriceTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_prices(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(Prices, LongAndWideAgree) {
  const PriceTable wide = parse(
      "date,AAA,BBB\n"
      "2020-01-02,10,20\n"
      "2020-01-01,11,21\n"
      "2020-01-03,12,22\n");
  const PriceTable lng = parse(
      "date,ticker,close,volume\n"
      "2020-01-03,AAA,12,5\n"
      "2020-01-01,AAA,11,5\n"
      "2020-01-02,AAA,10,5\n"
      "2020-01-02,BBB,20,7\n"
      "2020-01-01,BBB,21,7\n"
      "2020-01-03,BBB,22,7\n");
  EXPECT_EQ(wide.tickers, lng.tickers);
  EXPECT_EQ(wide.dates, (std::vector<std::string>{"2020-01-01", "2020-01-02", "2020-01-03"}));
  EXPECT_EQ(wide.dates, lng.dates);
  EXPECT_EQ(wide.prices, lng.prices);
  EXPECT_DOUBLE_EQ(wide.prices(0, 0), 11.0);
  EXPECT_FALSE(wide.volumes.has_value());
  ASSERT_TRUE(lng.volumes.has_value());
  EXPECT_EQ((*lng.volumes)(1, 1), 7.0);
}

TEST(Prices, IncompleteTickersAreDropped) {
  const PriceTable wide = parse(
      "date,AAA,BBB,CCC\n"
      "2020-01-01,1,2,3\n"
      "2020-01-02,1,,3\n"
      "2020-01-03,1,2,3\n");
  EXPECT_EQ(wide.tickers, (std::vector<std::string>{"AAA", "CCC"}));
  EXPECT_EQ(wide.dropped, (std::vector<std::string>{"BBB"}));

  const PriceTable lng = parse(
      "date,ticker,close\n"
      "2020-01-01,AAA,1\n"
      "2020-01-02,AAA,1\n"
      "2020-01-01,BBB,2\n"
      "2020-01-01,CCC,\n");
  EXPECT_EQ(lng.tickers, (std::vector<std::string>{"AAA"}));
  EXPECT_EQ(lng.dropped, (std::vector<std::string>{"BBB", "CCC"}));
}

TEST(Prices, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("date,A\n2020-01-01,1\n2020-01-02,abc\n"), 3u);
  EXPECT_EQ(parse_error_line("date,A\n2020-01-01,1\n\n2020-01-02,-1\n"), 4u);
  EXPECT_EQ(parse_error_line("date,A\n2020-01-01,1,2\n"), 2u);
  EXPECT_EQ(parse_error_line("date,A\n2020-01-01,1\n2020-01-01,2\n"), 3u);
  EXPECT_EQ(parse_error_line("date,ticker,close\n2020-01-01,A,1\n2020-01-01,A,2\n"), 3u);
  EXPECT_EQ(parse_error_line("day,A\n2020-01-01,1\n"), 1u);
  EXPECT_THROW(parse(""), DegenerateInputError);
  EXPECT_THROW(parse("date,A\n2020-01-01,\n"), DegenerateInputError);
  EXPECT_THROW(load_prices("/nonexistent/prices.csv"), ParseError);
}

PriceTable geometric_table(Eigen::Index dates, double growth) {
  PriceTable t;
  t.tickers = {"A", "B"};
  t.prices.resize(dates, 2);
  for (Eigen::Index d = 0; d < dates; ++d) {
    t.dates.push_back(std::to_string(100000 + d));
    t.prices(d, 0) = std::pow(growth, static_cast<double>(d) / 10.0);
    t.prices(d, 1) = 5.0;
  }
  return t;
}

TEST(Returns, NonOverlappingWindows) {
  const ReturnMatrix r = to_log_returns(geometric_table(1181, 1.1), 10);
  EXPECT_EQ(r.n(), 118);
  EXPECT_EQ(r.p(), 2);
  for (Eigen::Index t = 0; t < r.n(); ++t) {
    EXPECT_NEAR(r.values(t, 0), std::log(1.1), 1e-12);
    EXPECT_EQ(r.values(t, 1), 0.0);
  }
  EXPECT_EQ(to_log_returns(geometric_table(21, 1.1), 10).n(), 2);
  EXPECT_THROW(to_log_returns(geometric_table(20, 1.1), 10), DegenerateInputError);
  EXPECT_THROW(to_log_returns(geometric_table(50, 1.1), 0), ArgumentError);
}

TEST(Returns, SumOfDailyReturnsMatchesPeriodReturn) {
  PriceTable t = geometric_table(61, 1.0);
  Rng rng = derive_stream(StreamKey(8));
  std::lognormal_distribution<double> step(0.0, 0.02);
  for (Eigen::Index d = 1; d < t.rows(); ++d) t.prices(d, 0) = t.prices(d - 1, 0) * step(rng);
  const ReturnMatrix daily = to_log_returns(t, 1);
  const ReturnMatrix weekly = to_log_returns(t, 5);
  for (Eigen::Index w = 0; w < weekly.n(); ++w) {
    EXPECT_NEAR(weekly.values(w, 0), daily.values.col(0).segment(5 * w, 5).sum(), 1e-12);
  }
}

TEST(Volume, RankingAndSelection) {
  const PriceTable t = parse(
      "date,ticker,close,volume\n"
      "2020-01-01,AAA,1,10\n2020-01-02,AAA,1,30\n"
      "2020-01-01,BBB,1,40\n2020-01-02,BBB,1,0\n"
      "2020-01-01,CCC,1,50\n2020-01-02,CCC,1,50\n");
  EXPECT_EQ(rank_by_volume(t, 3), (std::vector<std::string>{"CCC", "AAA", "BBB"}));
  EXPECT_EQ(rank_by_volume(t, 1), (std::vector<std::string>{"CCC"}));
  EXPECT_EQ(rank_by_volume(t, 9).size(), 3u);
  const PriceTable s = select_tickers(t, {"BBB", "AAA"});
  EXPECT_EQ(s.tickers, (std::vector<std::string>{"BBB", "AAA"}));
  EXPECT_EQ((*s.volumes)(0, 0), 40.0);
  EXPECT_THROW(select_tickers(t, {"ZZZ"}), ArgumentError);
  EXPECT_THROW(rank_by_volume(parse("date,A\n2020-01-01,1\n"), 1), ArgumentError);
}

TEST(MatrixCsv, RoundTrip) {
  const std::string path = ::testing::TempDir() + "specboot_matrix.csv";
  {
    std::ofstream f(path);
    f << "x,y,z\n1,2,3\n# comment\n4.5,-6,7e-3\n";
  }
  const ReturnMatrix m = load_matrix_csv(path);
  std::remove(path.c_str());
  EXPECT_EQ(m.tickers, (std::vector<std::string>{"x", "y", "z"}));
  ASSERT_EQ(m.n(), 2);
  EXPECT_DOUBLE_EQ(m.values(1, 2), 7e-3);
  std::istringstream bad("a,b\n1,2\n3\n");
  try {
    parse_matrix_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream empty("a,b\n");
  EXPECT_THROW(parse_matrix_csv(empty), DegenerateInputError);
}

}  // namespace
}  // namespace specboot
