#pragma once

#include <string>
#include <vector>

#include "uplab/flat.hpp"

namespace uplab {

/// 17 significant digits, lowercase scientific ("1.0000000000000000e+00").
/// Non-finite values render as nan / inf / -inf.
std::string format_number(double v);

/// Sweep schema: param,lhs,rhs,ratio,target,slack,err (err = ratio error).
std::string sweep_csv(const std::vector<InequalityReport>& rows);

/// Two-column series with a header line.
std::string xy_csv(const std::string& x_label, const std::string& y_label,
                   const std::vector<double>& x, const std::vector<double>& y);

/// Writes `content` to `path`, creating parent directories. Throws Error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace uplab
