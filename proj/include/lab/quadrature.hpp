#ifndef LAB_QUADRATURE_HPP
#define LAB_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace lab {

// Gauss-Legendre rule on [-1,1]; nodes/weights computed once per order and cached.
struct GaussLegendre {
    std::vector<double> node;
    std::vector<double> weight;
};

const GaussLegendre& gauss_legendre(int n);

// integral of f over [a,b] with a single n-point Gauss-Legendre panel
template <class F>
double gl_integrate(F&& f, double a, double b, int n) {
    if (!(b > a)) return 0.0;
    const GaussLegendre& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.node.size(); ++i)
        acc += rule.weight[i] * f(mid + half * rule.node[i]);
    return acc * half;
}

// panel-subdivided version (panels equal-width), for long intervals
template <class F>
double gl_integrate(F&& f, double a, double b, int n, int panels) {
    if (!(b > a)) return 0.0;
    double acc = 0.0;
    const double w = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
        acc += gl_integrate(f, a + k * w, a + (k + 1) * w, n);
    return acc;
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    return acc;
}

} // namespace lab

#endif
