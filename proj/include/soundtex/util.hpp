// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_UTIL_HPP_
#define SOUNDTEX_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "soundtex/errors.hpp"

namespace soundtex {

// Median of a nonempty sample; even-sized samples average the two
// middle order statistics. Takes the vector by value because it sorts.
inline double median_of(std::vector<double> values) {
  if (values.empty()) throw InvalidInputError("median of empty sample");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline void require_finite(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidInputError(std::string(what) + ": non-finite value");
    }
  }
}

}  // namespace soundtex

#endif  // SOUNDTEX_UTIL_HPP_
