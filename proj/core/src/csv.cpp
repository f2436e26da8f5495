// Copyright 2026 The weyldirac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "weyldirac/csv.hpp"

#include <cstdio>
#include <ostream>

namespace weyldirac::csv {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string matrix_header(const std::string& prefix, Eigen::Index rows,
                          Eigen::Index cols) {
  std::string out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::string stem = prefix + "_" + std::to_string(i) + "_" + std::to_string(j);
      if (!out.empty()) out += ',';
      out += stem + "_re," + stem + "_im";
    }
  }
  return out;
}

std::string matrix_fields(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += ',' + num(m(i, j).real()) + ',' + num(m(i, j).imag());
    }
  }
  return out;
}

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

}  // namespace weyldirac::csv
