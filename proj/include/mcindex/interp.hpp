#pragma once

#include <vector>

#include "mcindex/types.hpp"

namespace mcindex {

/// Monotonicity-preserving cubic Hermite interpolant (Fritsch-Carlson
/// slope limiting).  Evaluation outside [x.first, x.last] clamps to the
/// end values.
class Pchip {
public:
    Pchip() = default;
    Pchip(const std::vector<double>& x, const std::vector<double>& y);

    double operator()(double xq) const;
    double derivative(double xq) const;

private:
    std::vector<double> x_, y_, d_;  // nodes, values, node slopes
};

/// Cumulative integral of samples (x_i, f_i) on a nonuniform grid by the
/// composite Simpson rule on consecutive point triples (trapezoid on a
/// trailing odd panel).  Returns F with F[0] = 0 and F[i] ~ int_{x0}^{xi} f.
std::vector<double> cumulative_simpson(const std::vector<double>& x,
                                       const std::vector<double>& f);

} // namespace mcindex
