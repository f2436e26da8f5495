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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "weyldirac/types.hpp"

namespace weyldirac::csv {

// %.17g, enough to round-trip a double.
std::string num(double v);

// "<prefix>_<i>_<j>_re,<prefix>_<i>_<j>_im" for every entry, row-major.
std::string matrix_header(const std::string& prefix, Eigen::Index rows,
                          Eigen::Index cols);

// ",re,im" per entry in the same order as matrix_header.
std::string matrix_fields(const Matrix& m);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace weyldirac::csv
