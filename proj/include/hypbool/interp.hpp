#pragma once

// Monotone cubic (Fritsch-Carlson) interpolation on a sorted grid.  Used for
// tabulated radial functions (covariogram, window covariograms) where the
// data is monotone and overshoot would corrupt tail behaviour.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hypbool {

class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matching nodes");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("MonotoneCubic: x not strictly increasing");

        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_.assign(n, 0.0);
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // Fritsch-Carlson endpoint limiting.
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (delta[i] == 0.0) { m_[i] = m_[i + 1] = 0.0; continue; }
            double a = m_[i] / delta[i], b = m_[i + 1] / delta[i];
            double s = a * a + b * b;
            if (s > 9.0) {
                double t = 3.0 / std::sqrt(s);
                m_[i] = t * a * delta[i];
                m_[i + 1] = t * b * delta[i];
            }
        }
    }

    double operator()(double x) const {
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double t2 = t * t, t3 = t2 * t;
        return y_[i] * (2 * t3 - 3 * t2 + 1) + m_[i] * h * (t3 - 2 * t2 + t)
             + y_[i + 1] * (-2 * t3 + 3 * t2) + m_[i + 1] * h * (t3 - t2);
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;
};

}  // namespace hypbool
