#include "uplab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "uplab/errors.hpp"

namespace uplab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string sweep_csv(const std::vector<InequalityReport>& rows) {
  std::string out = "param,lhs,rhs,ratio,target,slack,err\n";
  for (const auto& r : rows) {
    for (double v : {r.param, r.lhs, r.rhs, r.ratio, r.target, r.slack}) out += format_number(v) + ",";
    out += format_number(r.ratio_error) + "\n";
  }
  return out;
}

std::string xy_csv(const std::string& x_label, const std::string& y_label,
                   const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("series columns differ in length");
  std::string out = x_label + "," + y_label + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) out += format_number(x[i]) + "," + format_number(y[i]) + "\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  if (ec) throw Error("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << content;
  f.close();
  if (!f) throw Error("write to " + path + " failed");
}

}  // namespace uplab
