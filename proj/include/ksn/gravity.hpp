// Closed-form self-gravity of a free Gaussian wave packet: the potential
// kernel f(t,r;m,a) = int |psi|^2 / |r-r'| d3r', its small-mass, small-time
// and large-width expansions, expectation values, the per-eigenstate
// energy shifts for both flavor/space scenarios, and the dimensionless
// fractional delta_m shift Delta_SN.
//
// Natural units throughout: masses/energies in MeV, lengths in MeV^-1.

#ifndef KSN_GRAVITY_HPP
#define KSN_GRAVITY_HPP

#include "ksn/units.hpp"

#include <complex>
#include <optional>

namespace ksn::gravity {

/// Spherically symmetric free Gaussian, psi(t,r) =
/// (pi a^2)^{-3/4} (1 + i t/(m a^2))^{-3/2} exp(-r^2 / (2 a^2 (1 + i t/(m a^2)))).
struct GaussianState {
    double a;        // initial 1/e half-width, MeV^-1
    double m;        // mass, MeV
    double t = 0.0;  // elapsed time, MeV^-1

    GaussianState(double a_, double m_, double t_ = 0.0);

    double theta() const { return t / (m * a * a); }       // hbar t / (m a^2)
    double effective_width() const;                         // a sqrt(1 + theta^2)
};

std::complex<double> free_gaussian(const GaussianState& s, double r);

enum class PotentialMethod { closed, quadrature, mass_exp, time_exp, width_exp };

struct PotentialEvaluation {
    double value;             // MeV (inverse natural length)
    PotentialMethod method;
    double estimated_error;   // same units as value
};

/// f = erf(r / a_eff) / r with a_eff = a sqrt(1 + theta^2); the r -> 0
/// limit 2/(sqrt(pi) a_eff) is taken analytically.
PotentialEvaluation potential_f_closed(const GaussianState& s, double r);

/// The defining shell integral
///   f(r) = (1/r) int_0^r rho 4 pi s^2 ds + int_r^inf rho 4 pi s ds
/// by adaptive Gauss-Kronrod quadrature; tol is an absolute error budget
/// in the same inverse-length units as the result. Throws
/// convergence_error when the interval budget is exhausted.
PotentialEvaluation potential_f_quadrature(const GaussianState& s, double r, double tol);

/// Small-mass leading term 2 a m / (sqrt(pi) t) + O(m^3); requires t > 0.
PotentialEvaluation potential_f_mass_expansion(const GaussianState& s, double r);

/// Short-time form erf(r/a)/r - t^2 exp(-r^2/a^2) / (sqrt(pi) m^2 a^5) + O(t^4).
PotentialEvaluation potential_f_time_expansion(const GaussianState& s, double r);

/// Large-width form
///   2/(sqrt(pi) a) (1 - r^2/(3a^2) + r^4/(10a^4)) - t^2/(sqrt(pi) m^2 a^5)
/// + O(a^-7).
PotentialEvaluation potential_f_width_expansion(const GaussianState& s, double r);

/// <psi|f|psi> = sqrt(2/(pi a^2)) (1 + theta^2)^{-1/2}.
double expectation_f(const GaussianState& s);

/// First order in delta_m: <psi|f(m + delta_m)|psi> = <psi|f(m)|psi> +
/// sqrt(2/(pi a^2)) (t^2 / (m^3 a^4)) (1 + theta^2)^{-3/2} delta_m.
double expectation_f_deltam(const GaussianState& s, double delta_m);

struct EnergyShift {
    double delta_E_S;   // MeV, <= 0
    double delta_E_L;   // MeV, <= 0
    int scenario;
    double beta_sq;
};

/// Gravitational energy shifts of the two mass eigenstates at leading
/// order in 1/a. Scenario 1 (shared spatial wave-function):
///   dE_S = dE_L = -sqrt(2/pi) (G m_K / a) (m + beta_sq dm).
/// Scenario 2 (distinct wave-functions):
///   dE_S = -sqrt(2/pi) (G m / a) (m + beta_sq dm),
///   dE_L = -sqrt(2/pi) (G m / a) (m + (1 + beta_sq) dm).
/// The source mass m defaults to p.m_K; g_eff defaults to the physical G
/// (inflated-G verification runs pass their effective coupling).
EnergyShift energy_shift(int scenario, const units::KaonParameters& p,
                         double a, double beta_sq,
                         std::optional<double> source_mass = std::nullopt,
                         std::optional<double> g_eff = std::nullopt);

/// Delta_SN = sqrt(2/pi) G m_K / a, dimensionless (natural units).
double delta_sn(double m_K, double a);

/// Width a* with Delta_SN(a*) = 1, i.e. a* = sqrt(2/pi) G m_K. MeV^-1.
double critical_width(double m_K);

} // namespace ksn::gravity

#endif
