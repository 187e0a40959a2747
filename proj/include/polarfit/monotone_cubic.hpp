// monotone_cubic.hpp — shape-preserving piecewise-cubic interpolation
//
// Fritsch & Butland 1984, SIAM J Sci Stat Comput 5, 300: Hermite slopes
// limited so the interpolant never overshoots between increasing samples.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polarfit/errors.hpp"

namespace polarfit {

class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n != y_.size())
            throw DomainError("MonotoneCubic: x/y size mismatch");
        if (n < 4)
            throw DomainError("MonotoneCubic: need at least 4 points, got " +
                              std::to_string(n));
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw DomainError("MonotoneCubic: abscissae not strictly increasing at index " +
                                  std::to_string(i));

        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        slope_.resize(n);
        slope_[0] = d[0];
        slope_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double prod = d[i - 1] * d[i];
            if (prod > 0.0) {
                const double a = (h[i - 1] + 2.0 * h[i]) / (3.0 * (h[i - 1] + h[i]));
                slope_[i] = prod / (a * d[i] + (1.0 - a) * d[i - 1]);
            } else {
                slope_[i] = 0.0;  // local extremum: flat tangent keeps monotonicity
            }
        }
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }

    double operator()(double x) const {
        if (x < x_.front() || x > x_.back())
            throw RangeError("MonotoneCubic: x = " + std::to_string(x) +
                             " outside table range [" + std::to_string(x_.front()) +
                             ", " + std::to_string(x_.back()) + "]");
        if (x == x_.back()) return y_.back();

        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (x_[mid] > x) hi = mid;
            else lo = mid;
        }
        const double h = x_[lo + 1] - x_[lo];
        const double t = (x - x_[lo]) / h;
        const double t1 = 1.0 - t;
        // Hermite basis
        const double h00 = (1.0 + 2.0 * t) * t1 * t1;
        const double h10 = t * t1 * t1;
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return h00 * y_[lo] + h * h10 * slope_[lo]
             + h01 * y_[lo + 1] + h * h11 * slope_[lo + 1];
    }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slope_;
};

} // namespace polarfit
