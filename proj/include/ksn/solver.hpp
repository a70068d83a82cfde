// Radial integrator for the time-dependent Schroedinger-Newton dynamics
// of the kaon system, in both flavor/space scenarios, plus the
// doublet-formalism residual checker.
//
// Wave functions are stored as u(r) = r psi(r) on a uniform grid with
// u(0) = u(r_max) = 0, which removes the coordinate singularity and makes
// the kinetic operator tridiagonal. Stepping is implicit trapezoidal
// (Crank-Nicolson) with a predictor-corrector evaluation of the
// self-consistent potential: norm-preserving and second order in dt.
//
// The physical SN coupling of a kaon (~1e-55) is far below double
// precision resolution; dynamical runs therefore use a documented
// G-multiplier chosen through the dimensionless coupling
// kappa = G m^3 a (natural units). Physical-regime predictions are the
// closed forms in ksn::gravity.
//
// A run owns its state and is single-threaded; independent runs share
// nothing and may execute concurrently.

#ifndef KSN_SOLVER_HPP
#define KSN_SOLVER_HPP

#include "ksn/units.hpp"

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ksn::solver {

using complex = std::complex<double>;

struct RadialGrid {
    double r_max = 0;
    int n = 0;        // number of intervals; nodes 0..n

    double spacing() const { return r_max / n; }
    double r(int j) const { return j * spacing(); }
    void validate() const;   // n >= 64, r_max > 0
    bool operator==(const RadialGrid&) const = default;
};

struct RadialWaveFunction {
    RadialGrid grid;
    std::vector<complex> u;   // u_j = r_j psi(r_j), u[0] = u[n] = 0
    double mass = 0;          // MeV
};

/// O(h^4) prefix integrals of uniformly sampled values: out[j] =
/// int_0^{r_j} g dr by composite Simpson with a quadratic startup cell.
std::vector<double> cumulative_prefix_integral(std::span<const double> g, double dr);

/// Normalized Gaussian of width a at t = 0; requires a < r_max/6 so the
/// tail is negligible at the boundary. Grid norm is exactly 1.
RadialWaveFunction init_gaussian(const RadialGrid& grid, double a, double m);

double norm(const RadialWaveFunction& wf);                    // 4 pi int |u|^2 dr
double mean_r_squared(const RadialWaveFunction& wf);
double kinetic_energy(const RadialWaveFunction& wf);          // (1/2m) 4 pi int |u'|^2 dr

/// Per-unit-mass shell potential of one normalized density,
///   f(r_j) = (1/r_j) int_0^{r_j} |psi|^2 4 pi s^2 ds
///          + int_{r_j}^{r_max} |psi|^2 4 pi s ds,
/// from two cumulative sums.
std::vector<double> shell_potential(const RadialWaveFunction& wf);

struct WeightedDensity {
    const RadialWaveFunction* wf;
    double weight;          // |alpha|^2-style occupation, >= 0
    double active_mass;     // MeV, source mass
};

/// Phi(r_j) = -G sum_k w_k m_k f_k(r_j); Phi <= 0 everywhere and
/// r Phi(r_max) -> -G sum w_k m_k for compactly supported densities.
std::vector<double> self_potential(std::span<const WeightedDensity> sources, double g_eff);

struct ScenarioConfig {
    int scenario = 1;                 // 1: shared spatial wf, 2: per-eigenstate wfs
    complex alpha0{1.0, 0.0};
    complex beta0{0.0, 0.0};
    bool include_decay_weights = false;
    bool gravity_on = true;
    double g_multiplier = 1.0;        // G_eff = g_multiplier * G
    bool relative_phase_on_beta = true;  // flavor-coefficient phase convention
    double m_K = 0;                   // MeV; kinetic+passive mass in scenario 1
    double m_S = 0, m_L = 0;          // MeV; per-channel masses
    double gamma_S = 0, gamma_L = 0;  // MeV; used when include_decay_weights
    double initial_width = 0;         // a, MeV^-1
    RadialGrid grid;
    double dt = 0;                    // MeV^-1
    int corrector_passes = 1;         // 2 recommended for inflated-G runs

    void validate() const;
    double effective_g() const;
    std::array<double, 2> source_weights(double t) const;  // {w_S, w_L}
    complex alpha(double t) const;
    complex beta(double t) const;
};

/// m_S = m_K, m_L = m_K + delta_m, unit flavor weights on alpha.
ScenarioConfig make_scenario_config(int scenario, double m_K, double delta_m,
                                    double a, const RadialGrid& grid, double dt);

/// Multiplier that realizes the dimensionless coupling kappa = G_eff m^3 a.
double g_multiplier_for_coupling(double kappa, double m, double a);

struct EvolutionState {
    double t = 0;
    std::vector<RadialWaveFunction> channels;   // 1 (scenario 1) or 2 (S, L)
};

EvolutionState init_state(const ScenarioConfig& cfg);

/// One Crank-Nicolson step of all channels. Convenience wrapper; evolve()
/// amortizes the workspace across steps.
void step(EvolutionState& state, double dt, const ScenarioConfig& cfg);

struct ChannelSeries {
    std::string label;
    std::vector<double> norm;
    std::vector<double> r_squared;
    std::vector<double> kinetic;
    std::vector<double> potential;
    std::vector<double> central_phase;   // unwrapped arg psi(r_1, t)
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<ChannelSeries> channels;
    double dt_used = 0;
};

/// Evolve to t_final recording observables every output_stride steps
/// (t = 0 and the final time are always recorded).
EvolutionResult evolve(const ScenarioConfig& cfg, double t_final, int output_stride);

struct PhaseShiftResult {
    /// d/dt arg<psi_free(t)|psi_gravity(t)> per channel; equals -dE for a
    /// constant gravitational energy shift dE.
    std::vector<double> channel_rate;
    /// rate_L - rate_S (scenario 2; 0 in scenario 1).
    double rate_difference = 0;
    /// Effective delta_m reduction extracted from runs at beta^2 = 0 and 1:
    /// scenario 1 compares the shared channel, scenario 2 the channel that
    /// carries the full weight. Equals k Delta_SN^eff delta_m at leading
    /// order, k = 1 or 2.
    double delta_m_shift = 0;
};

/// Gravity-on vs gravity-off comparison runs; overlap phases are unwrapped
/// and fitted linearly. Throws convergence_error when the sampling cannot
/// resolve the phase.
PhaseShiftResult phase_shift_measurement(const ScenarioConfig& cfg, double t_final);

struct DoubletMatrices {
    std::array<std::array<complex, 2>, 2> M{};             // mass matrix, MeV
    std::array<std::array<std::optional<double>, 2>, 2> T{};  // kinetic masses; nullopt = absent
};

struct DoubletResiduals {
    double dynamical_1;     // || i d/dt Psi_1 - RHS_1 ||
    double dynamical_2;
    double constraint_21;   // || T21 Psi_1 - G M21 I(r) Psi_1 ||
    double constraint_12;
};

enum class DoubletAnsatz {
    automatic,   // shared when the inputs are identical, else coupled
    coupled,     // d/dt from one central-difference step of the coupled system
    shared       // Psi_1 = Psi_2 constrained to a common time derivative
};

struct DoubletOptions {
    double dt = 1e-4;
    DoubletAnsatz ansatz = DoubletAnsatz::automatic;
};

/// L2 residuals of the doublet-field SN system: two dynamical equations
/// and the two off-diagonal constraints. Inputs must share a grid and be
/// jointly normalized (|Psi_1|^2 + |Psi_2|^2 integrating to 1).
DoubletResiduals doublet_residuals(const DoubletMatrices& dm,
                                   const RadialWaveFunction& psi1,
                                   const RadialWaveFunction& psi2,
                                   double g_eff,
                                   const DoubletOptions& opt = {});

} // namespace ksn::solver

#endif
