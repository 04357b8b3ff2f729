#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "uplab/errors.hpp"
#include "uplab/report.hpp"

using namespace uplab;

TEST_CASE("format_number") {
  CHECK(format_number(1.0) == "1.0000000000000000e+00");
  CHECK(format_number(-0.25) == "-2.5000000000000000e-01");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  // Lossless round trip through the text form.
  for (double v : {0.1, 1.0 / 3.0, 4.0 / 9.0, 6.02214076e23, 5e-324, -1.7976931348623157e308,
                   std::nextafter(1.0, 2.0)})
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
}

TEST_CASE("sweep_csv") {
  InequalityReport r;
  r.param = 0.5;
  r.lhs = 2;
  r.rhs = 1;
  r.ratio = 2;
  r.target = 1;
  r.slack = 1;
  r.ratio_error = 1e-12;
  const std::string csv = sweep_csv({r, r});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "param,lhs,rhs,ratio,target,slack,err");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  CHECK(rows == 2);
  CHECK(sweep_csv({}) == "param,lhs,rhs,ratio,target,slack,err\n");
}

TEST_CASE("xy_csv") {
  CHECK(xy_csv("x", "y", {1}, {2}) == "x,y\n1.0000000000000000e+00,2.0000000000000000e+00\n");
  CHECK_THROWS_AS(xy_csv("x", "y", {1, 2}, {2}), DomainError);
}

TEST_CASE("write_file") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "uplab_test_report";
  fs::remove_all(dir);
  const std::string path = (dir / "a" / "b.txt").string();
  write_file(path, "hello\n");
  std::ifstream f(path);
  std::string s;
  std::getline(f, s);
  CHECK(s == "hello");
  // A regular file in place of the parent directory.
  CHECK_THROWS_AS(write_file(path + "/c.txt", "x"), Error);
  fs::remove_all(dir);
}
