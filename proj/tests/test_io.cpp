#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bowen/io.hpp"
#include "bowen/oracle.hpp"

using namespace bowen;

TEST(Io, NumberFormatRoundTrips) {
  EXPECT_EQ(format_number(0.75), "0.75");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  for (double x : {0.1, 1.0 / 3.0, 6.103515625e-5, 123456.789}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Io, SurvivalCsv) {
  SurvivalCurve c;
  c.t = {0.0, 0.5};
  c.survival = {1.0, 0.25};
  c.at_risk = {10, 3};
  EXPECT_EQ(survival_csv(c), "t,survival,n_at_risk\n0,1,10\n0.5,0.25,3\n");
}

TEST(Io, TimesCsvHistogram) {
  EntrySample s;
  s.times = {1, 1, 2, 5, 5, 5};
  EXPECT_EQ(times_csv(s), "time,count\n1,2\n2,1\n5,3\n");
}

TEST(Io, OracleCurveUsesSameSchema) {
  const System fair = System::bernoulli({0.5, 0.5});
  const SurvivalCurve c = exact_survival(fair, single_word(CylinderWord({1, 1})), 3);
  const std::string csv = survival_csv(c);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,survival,n_at_risk");
  EXPECT_EQ(curve_metadata(c)["mode"], "exact");
}

TEST(Io, WriteFileCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "bowen_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_file(dir / "a.csv", "x\n");
  std::ifstream in(dir / "a.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "x\n");
  std::filesystem::remove_all(dir.parent_path());
}
