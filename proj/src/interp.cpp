#include "mcindex/interp.hpp"

#include <algorithm>
#include <cmath>

namespace mcindex {

Pchip::Pchip(const std::vector<double>& x, const std::vector<double>& y) : x_(x), y_(y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("Pchip: need >=2 matching samples");
    for (size_t i = 0; i + 1 < n; ++i)
        if (!(x[i + 1] > x[i])) throw std::invalid_argument("Pchip: abscissae not increasing");

    std::vector<double> h(n - 1), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // One-sided ends (Fritsch-Carlson boundary formula with clipping).
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) d = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
        return d;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    const size_t i = static_cast<size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double Pchip::derivative(double xq) const {
    if (xq <= x_.front()) return d_.front();
    if (xq >= x_.back()) return d_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    const size_t i = static_cast<size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / h;
    const double t2 = t * t;
    const double dh00 = (6 * t2 - 6 * t) / h, dh10 = 3 * t2 - 4 * t + 1;
    const double dh01 = (-6 * t2 + 6 * t) / h, dh11 = 3 * t2 - 2 * t;
    return dh00 * y_[i] + dh10 * d_[i] + dh01 * y_[i + 1] + dh11 * d_[i + 1];
}

std::vector<double> cumulative_simpson(const std::vector<double>& x,
                                       const std::vector<double>& f) {
    const size_t n = x.size();
    if (f.size() != n || n < 2) throw std::invalid_argument("cumulative_simpson: bad sizes");
    std::vector<double> F(n, 0.0);
    size_t i = 0;
    while (i + 2 < n) {
        // Quadratic through (x_i, x_{i+1}, x_{i+2}) integrated over both panels.
        const double h0 = x[i + 1] - x[i];
        const double h1 = x[i + 2] - x[i + 1];
        // Integral of the interpolating parabola over the first panel.
        const double w0 = h0 * (2.0 * h0 + 3.0 * h1) / (6.0 * (h0 + h1));
        const double w1 = h0 * (h0 + 3.0 * h1) / (6.0 * h1);
        const double w2 = -h0 * h0 * h0 / (6.0 * h1 * (h0 + h1));
        F[i + 1] = F[i] + w0 * f[i] + w1 * f[i + 1] + w2 * f[i + 2];
        // Integral over the second panel [x_{i+1}, x_{i+2}]:
        const double v0 = -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        const double v1 = h1 * (h1 + 3.0 * h0) / (6.0 * h0);
        const double v2 = h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
        F[i + 2] = F[i + 1] + v0 * f[i] + v1 * f[i + 1] + v2 * f[i + 2];
        i += 2;
    }
    if (i + 1 < n) {
        // Trailing odd panel: parabola through the last three points.
        if (n >= 3) {
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            const double v0 = -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
            const double v1 = h1 * (h1 + 3.0 * h0) / (6.0 * h0);
            const double v2 = h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
            F[i + 1] = F[i] + v0 * f[i - 1] + v1 * f[i] + v2 * f[i + 1];
        } else {
            F[i + 1] = F[i] + 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
        }
    }
    return F;
}

} // namespace mcindex
