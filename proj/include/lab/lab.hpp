#ifndef LAB_LAB_HPP
#define LAB_LAB_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "lab/radiation.hpp"
#include "lab/solver.hpp"

namespace lab {

// Fixed-schema experiment configuration; unknown keys are rejected so a config
// hash pins the run exactly.
struct LabConfig {
    RadialFunction u0 = RadialFunction::zero();
    RadialFunction u1 = RadialFunction::poly_bump(1.0, 3);
    WaveSpeed speed = WaveSpeed::affine(1.0);
    EquationForm form = EquationForm::divergence;
    std::vector<double> epsilons;
    double dr = 0.02;
    double cfl = 0.4;
    DomainPolicy domain{DomainPolicy::Kind::moving_window, 0.0, 0.0};
    double t_max = 0.0;           // 0 -> auto from the predicted lifespan
    double t_max_safety = 2.5;     // auto t_max = safety * predicted T
    double slow_time_cap = 0.0;    // 0 -> none
    double threshold_scale = 0.0;  // 0 -> auto (amplification of the w1 scale)
    double record_dt = 0.0;
    unsigned seed = 0;

    std::string hash;              // sha256 of the canonical JSON
    nlohmann::json canonical;      // the normalized config document

    static LabConfig from_json(const nlohmann::json& j);
    static LabConfig from_file(const std::string& path);
    SimConfig sim_config(double epsilon, double dr_override = 0.0) const;
};

std::string sha256_hex(const std::string& bytes);

RadialFunction profile_from_json(const nlohmann::json& j);
RadialFunction profile_from_preset(const std::string& preset); // "bump:M=1,amp=1" etc.
WaveSpeed wavespeed_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const RadialFunction& f);

struct Prediction {
    double tau0 = kInf, nu0 = kInf;
    double rho0 = 0.0, rho0_tilde = 0.0;
    // profile blowup constants per model variant
    double div_I = kInf, div_II = kInf, var_I = kInf, var_II = kInf;
    double var_II_error = 0.0;
};

// one-stop prediction across both forms and cases; var_II is measured from the
// asymptotic finite-difference solver when requested
Prediction predict(const RadiationField& rf, bool var2_numeric = false);

struct SweepRow {
    double epsilon = 0.0;
    double dr = 0.0;
    bool censored = true;
    bool converged = false;
    double T_eps = std::numeric_limits<double>::quiet_NaN();
    double scaled = std::numeric_limits<double>::quiet_NaN();
    double T_half_dr = std::numeric_limits<double>::quiet_NaN();
    double fit_r2 = 0.0;
    std::string config_hash;
    std::vector<double> clock_series, invw_series; // plot data: 1/max|w1| vs clock
};

struct ScalingReport {
    CaseTag case_tag = CaseTag::case_I;
    EquationForm form = EquationForm::divergence;
    std::string config_hash;
    std::vector<SweepRow> rows; // epsilon descending
    Prediction prediction;
    double extrapolated_limit = std::numeric_limits<double>::quiet_NaN();
    double extrapolated_coeff = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
};

ScalingReport sweep(const LabConfig& cfg, int threads = 1);

// results.csv + summary.json + plot data + gnuplot script
void write_report(const ScalingReport& rep, const std::string& out_dir);
ScalingReport load_report(const std::string& out_dir);

} // namespace lab

#endif
