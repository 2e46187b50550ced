#include "lab/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace lab {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 2 paired nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: nodes must be strictly increasing");

    // Tridiagonal solve for natural end conditions (m_0 = m_{n-1} = 0).
    m_.assign(n, 0.0);
    if (n == 2) return;
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1];
        const double hr = x_[i + 1] - x_[i];
        sub[i] = hl;
        diag[i] = 2.0 * (hl + hr);
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    // forward elimination on rows 1..n-2
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * (x_[i] - x_[i - 1]); // upper of row i-1 is h_{i-1} = x_i - x_{i-1}
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        const double upper = x_[i + 1] - x_[i];
        m_[i] = (rhs[i] - upper * m_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

std::size_t CubicSpline::locate(double x) const {
    // interval index i with x in [x_i, x_{i+1}); clamped to boundary intervals
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return std::size_t(it - x_.begin()) - 1;
}

double CubicSpline::operator()(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
}

double CubicSpline::deriv2(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

double hermite(double x, double x0, double x1, double f0, double f1, double d0, double d1) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 +
           (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * h * d1;
}

double hermite_deriv(double x, double x0, double x1, double f0, double f1, double d0, double d1) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * f0 + (3 * s2 - 4 * s + 1) * h * d0 +
            (-6 * s2 + 6 * s) * f1 + (3 * s2 - 2 * s) * h * d1) / h;
}

} // namespace lab
