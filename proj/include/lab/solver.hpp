#ifndef LAB_SOLVER_HPP
#define LAB_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lab/radial.hpp"
#include "lab/util.hpp"

namespace lab {

// d2u/dt2 - div(c^2(u) grad u) = 0          (divergence,  kappa = 2)
// d2u/dt2 - c(u) div(c(u) grad u) = 0       (variational, kappa = 1)
// radial form: d2u/dt2 = c^2 (d2u/dr2 + du/dr / r) + kappa c c' (du/dr)^2
enum class EquationForm { divergence, variational };

std::string to_string(EquationForm f);

struct DomainPolicy {
    enum class Kind { fixed, moving_window };
    Kind kind = Kind::fixed;
    double r_max = 0.0; // fixed: right edge (0 -> t_max + M + 1)
    double width = 0.0; // moving window width (0 -> 4*(M + 4))
};

struct SimConfig {
    double epsilon = 0.1;
    WaveSpeed speed = WaveSpeed::affine(1.0);
    EquationForm form = EquationForm::divergence;
    RadialFunction u0 = RadialFunction::zero();
    RadialFunction u1 = RadialFunction::poly_bump(1.0, 3);
    double dr = 0.02;
    double cfl = 0.4;
    DomainPolicy domain;
    double t_max = 1000.0;
    double slow_time_cap = kInf;         // b: stop once tau(t) > b
    double blowup_threshold_scale = 50.0; // candidate blowup at max|w1| >= scale*eps
    bool limiter = true;                  // minmod slopes; false -> Fromm (linear runs)
    double record_dt = 0.0;               // snapshot cadence; 0 disables recording
    int diag_every = 1;                    // diagnostics cadence in steps
    double diag_dt = 0.0;                  // diagnostics cadence in time (overrides diag_every)

    double support_radius() const;
    CaseTag case_tag() const { return classify_wavespeed(speed); }
    double slow_time(double t) const;     // eps sqrt(1+t) or eps^2 ln(1+t)
    void validate() const;
};

struct SimState {
    double t = 0.0;
    double r0 = 0.0; // radius of node 0
    double dr = 0.0;
    std::vector<double> u, p, q; // p = du/dt, q = du/dr
    std::size_t size() const { return u.size(); }
    double r_at(std::size_t i) const { return r0 + double(i) * dr; }
};

struct Snapshot {
    double t = 0.0;
    double r0 = 0.0;
    double dr = 0.0;
    std::vector<double> u, p, q;
    double r_at(std::size_t i) const { return r0 + double(i) * dr; }
};

struct DiagSample {
    double t = 0.0;
    double max_w1 = 0.0, max_w2 = 0.0;
    double max_p = 0.0, max_q = 0.0;
    double energy = 0.0;
    double dt = 0.0;
};

struct SimRecord {
    double dr = 0.0;
    double epsilon = 0.0;
    double M = 0.0;
    std::vector<Snapshot> snaps;
    std::vector<DiagSample> diags;

    const Snapshot& at_time(double t) const; // nearest snapshot
    // Hermite in t between snapshots, 4-point Lagrange in r
    double u_at(double t, double r) const;
    double p_at(double t, double r) const;
    double q_at(double t, double r) const;
};

struct BlowupReport {
    enum class Outcome { blowup, censored };
    Outcome outcome = Outcome::censored;
    double T_eps = kInf;         // extrapolated lifespan (blowup outcome)
    double t_reached = 0.0;      // last integrated time
    double t_threshold = kInf;   // raw threshold-crossing time
    double r_star = 0.0;
    double sigma_star = 0.0;     // r_star - T_eps
    double fit_r2 = 0.0;
    double fit_slope = 0.0, fit_intercept = 0.0;
    std::string clock;           // "sqrt(1+t)" or "ln(1+t)"
    std::string censor_reason;   // for censored outcomes
    std::vector<DiagSample> series;
};

class RadialWaveSolver {
  public:
    explicit RadialWaveSolver(SimConfig cfg);

    void step();                    // one CFL-limited Heun step
    const SimState& state() const { return state_; }
    double current_dt() const { return dt_last_; }
    const DiagSample& last_diag() const { return diag_; }

    // integrate to blowup/censoring; optionally collect snapshots + diagnostics
    BlowupReport run(SimRecord* record = nullptr);

  private:
    void compute_speed(const double* u, double* c, double* cp, std::size_t count) const;
    void fill_ghosts(double* u, double* p, double* q) const;
    void rhs(const double* u, const double* p, const double* q, double* ku, double* kp,
             double* kq);
    void shift_window();
    void refresh_diag();

    SimConfig cfg_;
    SimState state_;
    std::size_t n_ = 0;     // active nodes
    std::int64_t i0_ = 0;   // global index of node 0 (r0 = i0*dr)
    double kappa_ = 2.0;
    double dt_last_ = 0.0;
    DiagSample diag_;
    long step_count_ = 0;

    // padded buffers (2 ghosts each side)
    std::vector<double> ub_, pb_, qb_, u1b_, p1b_, q1b_;
    std::vector<double> cb_, cpb_, rmb_, rpb_, smb_, spb_;
    std::vector<double> dp_, dq_;
    std::vector<double> ku_, kp_, kq_, ku2_, kp2_, kq2_;
};

// w1 = (dt - c dr)(sqrt(r) u), w2 = (dt + c dr)(sqrt(r) u) on r >= r_min > 0
struct WFields {
    std::vector<double> r, w1, w2;
};
WFields w_variables(const Snapshot& snap, const WaveSpeed& speed, double r_min);

struct CharPath {
    double lambda = 0.0;
    int sign = +1;
    bool truncated = false;
    std::vector<double> t, r, u, w1, w2;
};

// integrates dr/dt = sign * c(u) from (t=0, r=lambda) through the record
CharPath extract_characteristic(const SimRecord& rec, const WaveSpeed& speed, double lambda,
                                int sign);

struct BootstrapSeries {
    std::vector<double> t, A, B, C;
};

// A(t) = sup_{1/eps<=s<=t} int_D |w1| dr, B = sup s^{1/2}|u|, C = sup s|w2|
// over the strip D between the outgoing characteristics through rho0-1 and M
BootstrapSeries bootstrap_functionals(const SimRecord& rec, const WaveSpeed& speed,
                                      double rho0);

double discrete_energy(const Snapshot& snap, const WaveSpeed& speed);

// flat binary field record: header + per-snapshot rows (see README)
void write_field_record(const SimRecord& rec, const std::string& path);
SimRecord read_field_record(const std::string& path);

} // namespace lab

#endif
