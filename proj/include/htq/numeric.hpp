#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace htq {

// Neumaier-compensated accumulator. Used wherever long sums of
// near-cancelling terms feed a small result (matrix powers, gamma(t)).
struct CompSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

inline double comp_dot(const double* a, const double* b, std::size_t n) {
    CompSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(a[i] * b[i]);
    return s.value();
}

inline double comp_total(const std::vector<double>& v) {
    CompSum s;
    for (double x : v) s.add(x);
    return s.value();
}

}  // namespace htq
