#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "moralnet/report.hpp"
#include "test_support.hpp"

using namespace moralnet;

namespace {

Report ranking(std::vector<std::pair<std::string, double>> rows) {
  Report r;
  r.columns = {{"rank", ColumnType::integer}, {"word", ColumnType::text}, {"score", ColumnType::real}};
  long long rank = static_cast<long long>(rows.size());
  for (auto& [w, s] : rows) r.add_row({rank--, w, s});
  return r;
}

std::string render(const Report& r, ReportFormat f) {
  std::ostringstream out;
  write_report(r, out, f);
  return out.str();
}

}  // namespace

TEST(WriteReport, CsvHeaderPlusRowsSortedByKey) {
  auto csv = render(ranking({{"church", 62.0312345}, {"religion", 52.71}}), ReportFormat::csv);
  EXPECT_EQ(csv, "rank,word,score\n1,religion,52.71\n2,church,62.0312\n");
}

TEST(WriteReport, JsonArrayOfObjects) {
  auto json = nlohmann::json::parse(render(ranking({{"a", 1.0}, {"b", 2.0}}), ReportFormat::json));
  ASSERT_TRUE(json.is_array());
  ASSERT_EQ(json.size(), 2u);
  EXPECT_EQ(json[0]["word"], "b");
  EXPECT_EQ(json[0]["rank"], 1);
}

TEST(WriteReport, EmptyReportIsHeaderOnly) {
  EXPECT_EQ(render(ranking({}), ReportFormat::csv), "rank,word,score\n");
  EXPECT_EQ(nlohmann::json::parse(render(ranking({}), ReportFormat::json)).size(), 0u);
}

TEST(WriteReport, UnwritablePathIsIoError) {
  EXPECT_THROW(write_report(ranking({}), "/nonexistent-dir/x.csv", ReportFormat::csv), IoError);
}

TEST(WriteReport, TypeMismatchRejected) {
  Report r;
  r.columns = {{"x", ColumnType::real}};
  r.rows.push_back({std::string("oops")});
  std::ostringstream out;
  EXPECT_THROW(write_report(r, out, ReportFormat::csv), ValidationError);
}

TEST(WriteReport, SixSignificantDigitsAndNaN) {
  Report r;
  r.columns = {{"k", ColumnType::integer}, {"v", ColumnType::real}};
  r.add_row({0LL, 2.0 / 3.0});
  r.add_row({1LL, std::nan("")});
  r.add_row({2LL, 1234567.0});
  EXPECT_EQ(render(r, ReportFormat::csv), "k,v\n0,0.666667\n1,\n2,1.23457e+06\n");
  auto json = nlohmann::json::parse(render(r, ReportFormat::json));
  EXPECT_TRUE(json[1]["v"].is_null());
}

// Property: write -> read -> write is byte-identical and the parsed values
// equal the originals rounded to six significant digits.
TEST(ReadReport, RoundTripsRandomReports) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> real(-1e4, 1e4);
  const std::vector<Column> cols = {{"id", ColumnType::integer}, {"name", ColumnType::text},
                                    {"value", ColumnType::real},  {"flag", ColumnType::boolean}};
  for (int trial = 0; trial < 200; ++trial) {
    Report r;
    r.columns = cols;
    const int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      std::string name = "w" + std::to_string(rng() % 100);
      if (rng() % 4 == 0) name += ", \"quoted\"";
      double v = rng() % 10 == 0 ? std::nan("") : real(rng) * std::pow(10.0, static_cast<int>(rng() % 9) - 4);
      r.add_row({static_cast<long long>(i), name, v, rng() % 2 == 0});
    }
    for (auto fmt : {ReportFormat::csv, ReportFormat::json}) {
      const std::string first = render(r, fmt);
      std::istringstream in(first);
      Report back = read_report(in, cols, fmt);
      EXPECT_EQ(render(back, fmt), first);
      ASSERT_EQ(back.rows.size(), r.rows.size());
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        double want = csv::round_real(std::get<double>(r.rows[i][2]));
        double got = std::get<double>(back.rows[i][2]);
        if (std::isnan(want)) EXPECT_TRUE(std::isnan(got));
        else EXPECT_EQ(got, want);
        EXPECT_EQ(std::get<std::string>(back.rows[i][1]), std::get<std::string>(r.rows[i][1]));
      }
    }
  }
}
