#ifndef LAB_SPLINE_HPP
#define LAB_SPLINE_HPP

#include <cstddef>
#include <vector>

namespace lab {

// Natural cubic spline on strictly increasing nodes (non-uniform allowed).
// C^2 on the interior; evaluation outside the node range extrapolates with
// the boundary cubic.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;

    bool empty() const { return x_.empty(); }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }

  private:
    std::size_t locate(double x) const;
    std::vector<double> x_, y_, m_; // m_: second derivatives at nodes
};

// Cubic Hermite interpolation on [x0,x1] from values and first derivatives.
double hermite(double x, double x0, double x1, double f0, double f1, double d0, double d1);
double hermite_deriv(double x, double x0, double x1, double f0, double f1, double d0, double d1);

} // namespace lab

#endif
