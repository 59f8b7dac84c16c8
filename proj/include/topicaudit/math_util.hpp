#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace topicaudit {

// psi(x) for x > 0. Recurrence psi(x) = psi(x+1) - 1/x shifts the argument
// to >= 10, then a 6-term asymptotic series in 1/x^2. Relative error is
// below 1e-10 down to x = 1e-6. Throws std::domain_error for x <= 0.
inline double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ ln x - 1/(2x) - sum_n B_2n / (2n x^2n)
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = inv2 * (1.0 / 12.0 +
                    inv2 * (-1.0 / 120.0 +
                    inv2 * (1.0 / 252.0 +
                    inv2 * (-1.0 / 240.0 +
                    inv2 * (1.0 / 132.0 +
                    inv2 * (-691.0 / 32760.0))))));
    return result + std::log(x) - 0.5 * inv - series;
}

inline double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

}  // namespace topicaudit
