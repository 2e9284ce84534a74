#pragma once
// Small helpers shared by the two steppers.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gevflow/field.hpp"
#include "gevflow/prandtl.hpp"

namespace gevflow::detail {

inline void zero_walls(Field& f) {
  for (int j : {0, f.ny() - 1}) {
    auto r = f.row(j);
    std::fill(r.begin(), r.end(), cplx{});
  }
}

inline void require_finite(const Field& f, const char* where) {
  for (int j = 0; j < f.ny(); ++j) {
    auto r = f.row(j);
    for (int m = 0; m < f.modes(); ++m) {
      if (!std::isfinite(r[m].real()) || !std::isfinite(r[m].imag())) {
        std::ostringstream os;
        os << where << ": non-finite coefficient at mode " << m << ", row " << j
           << " (y = " << f.grid().y(j) << ")";
        throw solver_abort(os.str());
      }
    }
  }
}

inline double max_abs_physical(const Field& f) {
  const PhysicalField v = to_physical(f);
  double m = 0.0;
  for (double x : v.values) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace gevflow::detail
