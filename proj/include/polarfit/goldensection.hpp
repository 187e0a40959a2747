// goldensection.hpp — golden-section minimization of a scalar function

#pragma once

#include <cmath>
#include <utility>

namespace polarfit {

// Shrinks [lo, hi] around a minimum until hi-lo < xtol, reporting every
// evaluation through `record(x, f(x))`. Returns the best sample seen.
// Derivative-free on purpose: the fit objectives pass through iterative
// solvers and are only piecewise smooth at their tolerance level.
template <typename F, typename Rec>
std::pair<double, double> golden_section_min(F&& f, double lo, double hi,
                                             double xtol, Rec&& record) {
    constexpr double kInvPhi = 0.6180339887498949;  // 1/phi
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1);
    record(x1, f1);
    double f2 = f(x2);
    record(x2, f2);

    double best_x = f1 < f2 ? x1 : x2;
    double best_f = f1 < f2 ? f1 : f2;

    while (hi - lo > xtol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1; f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = f(x1);
            record(x1, f1);
            if (f1 < best_f) { best_f = f1; best_x = x1; }
        } else {
            lo = x1;
            x1 = x2; f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = f(x2);
            record(x2, f2);
            if (f2 < best_f) { best_f = f2; best_x = x2; }
        }
    }
    return {best_x, best_f};
}

} // namespace polarfit
