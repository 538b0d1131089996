#pragma once

#include <cstddef>
#include <vector>

#include "cylcm/error.hpp"

namespace cylcm {

// Thomas elimination for a symmetric tridiagonal system. No pivoting, so the
// caller must supply a definite matrix.
inline std::vector<double> solve_tridiag(const std::vector<double>& diag, const std::vector<double>& off,
                                         std::vector<double> rhs) {
    const std::size_t m = diag.size();
    std::vector<double> d(diag);
    for (std::size_t i = 1; i < m; ++i) {
        if (d[i - 1] == 0.0) fail_num("tridiagonal solve hit a zero pivot");
        double l = off[i - 1] / d[i - 1];
        d[i] -= l * off[i - 1];
        rhs[i] -= l * rhs[i - 1];
    }
    if (d[m - 1] == 0.0) fail_num("tridiagonal solve hit a zero pivot");
    rhs[m - 1] /= d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / d[i];
    return rhs;
}

}  // namespace cylcm
