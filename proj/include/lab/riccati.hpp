#ifndef LAB_RICCATI_HPP
#define LAB_RICCATI_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lab/radial.hpp"
#include "lab/radiation.hpp"
#include "lab/util.hpp"

namespace lab {

struct CharPath; // solver.hpp

// Sampled coefficients of dw/dt = a0 w^2 + a1 w + a2 along a characteristic.
struct CoefficientTrack {
    std::vector<double> t;  // ascending
    std::vector<double> a0, a1, a2;
    std::string provenance = "synthetic";

    void validate() const;
    static CoefficientTrack from_csv(const std::string& path);
    void to_csv(const std::string& path) const;
};

// a0 = c'(u)/(2 sqrt(r) c(u))
// a1 = c'(u)/(4 sqrt(r) c(u)) * (3 c(u) u / sqrt(r) - 2 w2)
// a2 = c^2(u) u/(4 r^{3/2}) + c(u) c'(u) u^2/(2 r^{3/2}) - 3 c'(u) u w2/(4 r)
CoefficientTrack coefficients_along(const CharPath& path, const WaveSpeed& c);

struct BlowupBound {
    double K = 0.0;
    std::optional<double> upper_bound_T; // none if w_start <= K or bound never reached
    double w_start = 0.0;
};

// K = (int |a2|) exp(int |a1|); the bound is the first T with
// (int_0^T a0) exp(-int_0^T |a1|) >= (w(0) - K)^{-1}. Requires a0 >= 0.
BlowupBound hormander_bound(const CoefficientTrack& track, double w_start);

struct RiccatiResult {
    std::vector<double> t, w;           // accepted solution samples
    std::optional<double> blowup_time;  // |w| escape bracketed to 1e-9
};

// Adaptive Dormand-Prince 4(5) integration of the Riccati equation with the
// sampled coefficients (cubic-spline interpolated); independent oracle for the
// blowup bound.
RiccatiResult integrate_riccati(const CoefficientTrack& track, double w_start, double t_end);
RiccatiResult integrate_riccati(const std::function<double(double)>& a0,
                                const std::function<double(double)>& a1,
                                const std::function<double(double)>& a2, double w_start,
                                double t0, double t_end);

// f(t) <= (f(0) + 1/2 int g) exp(1/2 int h) for df^2/dt <= f g + h f^2, g,h >= 0
double gronwall_bound(double f0, const std::vector<double>& t, const std::vector<double>& g,
                      const std::vector<double>& h, double t_eval);

struct UpperLifespan {
    std::optional<double> T_upper;
    double K = 0.0;
    double w_start = 0.0;
    bool sign_flipped = false; // the -w1 transform was applied (case II)
    std::string note;
};

// Applies the blowup bound to a track extracted along the distinguished
// outgoing characteristic starting at t = 1/eps; when the crossing lies past
// the track the cumulative integral of a0 is extended by its fitted
// case-appropriate tail (a0 ~ k/sqrt(t) for case I, k/t for case II).
UpperLifespan predicted_upper_lifespan(CaseTag case_tag, const CoefficientTrack& track,
                                       double w_start);

} // namespace lab

#endif
