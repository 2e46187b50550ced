#ifndef LAB_PROFILE_HPP
#define LAB_PROFILE_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "lab/radiation.hpp"
#include "lab/spline.hpp"
#include "lab/util.hpp"

namespace lab {

// Slow-time model equations for the leading profile:
//   div_I  : d2V/dtau dsigma + 2 V d2V/dsigma2 + 2 (dV/dsigma)^2 = 0
//   div_II : d2G/dtau dsigma + G^2 d2G/dsigma2 + 2 G (dG/dsigma)^2 = 0
//   var_I  : d2V/dtau dsigma + 2 V d2V/dsigma2 +   (dV/dsigma)^2 = 0
//   var_II : d2G/dtau dsigma + G^2 d2G/dsigma2 +   G (dG/dsigma)^2 = 0
// The divergence forms have explicit characteristic solutions; the variational
// forms are integrated by finite differences.
enum class ModelVariant { div_I, div_II, var_I, var_II };

std::string to_string(ModelVariant v);

// Explicit characteristic solution of a divergence-form model:
//   div_I : sigma(tau,s) = s + 2 F0(s) tau,   W = F0'(s)/(1 + 2 F0'(s) tau)
//   div_II: sigma(tau,s) = s + F0(s)^2 tau,   Q = F0'(s)/(1 + 2 F0 F0'(s) tau)
// with V (resp. G) constant along characteristics.
class CharacteristicFan {
  public:
    ModelVariant variant = ModelVariant::div_I;
    double M = 1.0;
    double tau_star = kInf;    // profile blowup time
    double rho = 0.0;          // concentration point of the s grid
    double blowup_margin = 1e-3;

    std::vector<double> s_grid;          // 4096 nodes, half within |s - rho| <= 1
    std::vector<double> f0_of_s, f0_prime_of_s;

    double f0(double s) const;           // 0 outside [s_grid.front(), M]
    double f0_prime(double s) const;

    double sigma_of(double tau, double s) const;
    double ds_sigma(double tau, double s) const;            // d sigma / d s
    double invert(double tau, double sigma) const;          // bisection to 1e-12
    double gradient_on(double tau, double s) const;         // W resp. Q at (tau, s)
    double value_on(double s) const { return f0(s); }       // V resp. G

  private:
    friend CharacteristicFan make_fan(const RadiationField&, ModelVariant, double);
    CubicSpline f0_s_, f0p_s_;
};

CharacteristicFan make_fan(const RadiationField& rf, ModelVariant v,
                           double sigma_min = -200.0);

// Finite-difference grid for the transport form dW/dtau + lam(V) dW/dsigma
// = -mu(V) W^2, first-order upwind in sigma, Heun in tau.
struct FdProfileGrid {
    double sigma_min = -30.0;
    double dsigma = 0.0;        // 0 -> 1e-3 * (M - sigma_min) / (M + 200)
    double cfl = 0.4;
    double grid_tol = 2e-3;     // blowup when max|W| > 1/grid_tol
    double checkpoint_dtau = 0.0; // 0 -> (tau span)/400
    int slice_stride = 32;        // sigma decimation of stored slices
    std::vector<double> slice_taus; // taus at which full-resolution slices are kept
};

struct ProfileBlowup {
    double tau_star = kInf;
    double sigma_star = 0.0;
};

struct FullSlice {
    double tau;
    std::vector<double> sigma, V, W;
};

class ProfileSolution {
  public:
    enum class Backend { characteristic, finite_difference };

    ModelVariant variant = ModelVariant::div_I;
    Backend backend = Backend::characteristic;
    double M = 1.0;
    std::optional<ProfileBlowup> blowup;

    double V(double tau, double sigma) const;
    double W(double tau, double sigma) const;       // dV/dsigma
    double V_tau(double tau, double sigma) const;   // characteristic backend only

    const CharacteristicFan& fan() const;

    // finite-difference diagnostics
    const std::vector<double>& checkpoint_taus() const { return cp_tau_; }
    const std::vector<double>& checkpoint_max_w() const { return cp_maxw_; }
    const std::vector<double>& checkpoint_energy() const { return cp_energy_; } // int W^2 dsigma
    const std::vector<FullSlice>& full_slices() const { return full_slices_; }

  private:
    friend ProfileSolution solve_characteristic(const RadiationField&, ModelVariant, double);
    friend ProfileSolution solve_asymptotic_pde(const RadiationField&, ModelVariant, double,
                                                const FdProfileGrid&,
                                                const std::vector<double>*,
                                                std::vector<std::vector<double>>*,
                                                std::vector<std::vector<double>>*);
    std::shared_ptr<CharacteristicFan> fan_;
    // decimated stored slices for the fd backend
    std::vector<double> slice_sigma_;
    std::vector<double> slice_tau_;
    std::vector<std::vector<double>> slice_V_, slice_W_;
    std::vector<double> cp_tau_, cp_maxw_, cp_energy_;
    std::vector<FullSlice> full_slices_;
};

ProfileSolution solve_characteristic(const RadiationField& rf, ModelVariant v,
                                     double sigma_min = -200.0);

// March the transport form to tau_end or blowup. When tracer_l is non-null the
// characteristics emanating from those sigma values are followed through the
// numerical field and V, W along them appended to tracer_V/tracer_W per
// checkpoint.
ProfileSolution solve_asymptotic_pde(const RadiationField& rf, ModelVariant v,
                                     double tau_end, const FdProfileGrid& grid = {},
                                     const std::vector<double>* tracer_l = nullptr,
                                     std::vector<std::vector<double>>* tracer_V = nullptr,
                                     std::vector<std::vector<double>>* tracer_W = nullptr);

// blowup time of the model; var_II is measured from the fd solver (error bar
// from a grid-halving rerun when requested)
double profile_blowup_time(const RadiationField& rf, ModelVariant v,
                           double* error_bar = nullptr,
                           const FdProfileGrid& grid = {});

struct LemmaA5Report {
    std::array<double, 3> l;            // l0 < l1 < l2 inside the detected interval
    std::vector<double> tau;            // checkpoint times
    std::array<std::vector<double>, 3> G_along; // G(tau_k, l_i)
    std::array<std::vector<double>, 3> Q_along; // Q(tau_k, l_i)
    std::vector<double> energy;         // int Q^2 dsigma at checkpoints
    double energy_drift = 0.0;          // max relative deviation for tau <= 0.8 tau*
    double q_growth_factor = 0.0;       // max|Q| final / max|Q| initial over grid
    bool q_monotone_last10 = false;     // max_j |Q(tau_k, l_j)| monotone near blowup
    double tau_blowup = kInf;
};

// Runs the var_II solver with characteristic tracers on an auto-detected
// interval where F0' < 0 and F0'' > 0; throws std::invalid_argument when the
// field is trivial or no admissible interval exists.
LemmaA5Report lemma_a5_evidence(const RadiationField& rf, const FdProfileGrid& grid = {},
                                const std::optional<std::array<double, 3>>& ls = std::nullopt);

} // namespace lab

#endif
