#include <gtest/gtest.h>

#include <sstream>

#include "qdkd/report.hpp"

using namespace qdkd;
using namespace qdkd::report;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST(FormatNumber, FifteenSignificantDigits) {
  EXPECT_EQ(format_number(0.375), "0.375");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333333");
  EXPECT_EQ(format_number(0.954434002924965123), "0.954434002924965");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(rounded(2.0 / 3.0), 0.666666666666667);
}

TEST(Cells, Encodings) {
  EXPECT_EQ(to_cell(Scalar{}), "");
  EXPECT_EQ(to_cell(Scalar(true)), "true");
  EXPECT_EQ(to_cell(Scalar(std::uint64_t{42})), "42");
  EXPECT_EQ(to_cell(Scalar(std::string("fail"))), "fail");
  EXPECT_TRUE(to_json(Scalar{}).is_null());
}

TEST(RoundsCsv, HeaderAndCells) {
  std::ostringstream os;
  write_rounds_csv(os, run_experiment({0.5, 0.7, 300, 3}, bob_key_attack({0.5, 0.5})));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "index,mode,j,k,m,kA,jB,eve_j,eve_k,cm_detected,cm_correlated,eve_branch");
  std::size_t rows = 0;
  bool saw_fail = false, saw_none = false;
  while (std::getline(is, line)) {
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), 12u) << line;
    EXPECT_EQ(cells[0], std::to_string(rows));
    if (cells[1] == "MM") {
      EXPECT_TRUE(cells[4] == "0" || cells[4] == "1" || cells[4] == "fail");
      EXPECT_EQ(cells[9], "");
      saw_fail |= cells[4] == "fail";
      if (cells[4] == "fail") {
        EXPECT_EQ(cells[5], "");
      }
    } else {
      EXPECT_EQ(cells[1], "CM");
      EXPECT_EQ(cells[3], "");
      EXPECT_EQ(cells[4], "");
      EXPECT_TRUE(cells[9] == "0" || cells[9] == "1");
    }
    saw_none |= cells[8] == "none";
    ++rows;
  }
  EXPECT_EQ(rows, 300u);
  EXPECT_TRUE(saw_fail);
  EXPECT_TRUE(saw_none);
}

TEST(CsvAndJson, CarryTheSameNumbers) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto log = run_experiment({0.5, 0.9, 2000, seed}, alice_key_attack({0.3, 0.7}));
    Fields all = fields(empirical_statistics(log));
    append(all, fields(analytic_report(AttackTarget::alice, {0.3, 0.7})));
    append(all, fields(loss_report(0.9, 0.95, AttackTarget::alice, 0.3)));
    std::ostringstream os;
    write_csv_row(os, all);
    std::string row = os.str();
    row.pop_back();
    const auto cells = split(row);
    const auto json = to_json(all);
    ASSERT_EQ(cells.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto& value = json[all[i].first];
      if (value.is_number_float()) {
        EXPECT_EQ(std::stod(cells[i]), value.get<double>()) << all[i].first;
      } else if (value.is_null()) {
        EXPECT_EQ(cells[i], "");
      }
    }
  }
}
