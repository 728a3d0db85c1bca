#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include <adaptista/csv.hpp>
#include <adaptista/rng.hpp>

using namespace adaptista;

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  Rng rng(RngSpec{1, "fmt"});
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(40)) - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(MatrixCsv, RoundTripBitwise) {
  Rng rng(RngSpec{2, "csv"});
  Matrix m(5, 7);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  std::stringstream io;
  write_matrix_csv(m, io);
  const std::string text = io.str();
  EXPECT_EQ(read_matrix_csv(io), m);
  std::stringstream again;
  write_matrix_csv(m, again);
  EXPECT_EQ(again.str(), text);
}

TEST(MatrixCsv, SkipsBlankLinesAndReportsErrors) {
  std::istringstream ok("1,2\n\n3,4\n");
  const Matrix m = read_matrix_csv(ok);
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m(1, 0), 3.0);
  std::istringstream bad("1,2\n3,x\n");
  try {
    read_matrix_csv(bad, "input.csv");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("input.csv:2"), std::string::npos) << e.what();
  }
  std::istringstream nonfinite("1,inf\n");
  EXPECT_THROW(read_matrix_csv(nonfinite), std::runtime_error);
  std::istringstream empty("");
  EXPECT_THROW(read_matrix_csv(empty), std::runtime_error);
}
