// Flavor-space phenomenology of the neutral kaon: the non-Hermitian
// mixing Hamiltonian H = M - i/2 Gamma, its eigensystem, the CP
// parameter epsilon, the X/Y parametrization, oscillation and CSL
// survival probabilities, and the self-gravity rescaling of delta_m.
//
// All times are proper times in natural units (MeV^-1), all energies MeV.
// Every operation is a pure function over immutable inputs.

#ifndef KSN_FLAVOR_HPP
#define KSN_FLAVOR_HPP

#include "ksn/units.hpp"

#include <array>
#include <complex>

namespace ksn::flavor {

using complex = std::complex<double>;
using Mat2 = std::array<std::array<complex, 2>, 2>;

/// 2x2 mass and decay matrices, both Hermitian; with CPT symmetry the
/// diagonals are (m_K, m_K) and (Gamma, Gamma).
struct MixingHamiltonian {
    Mat2 M{};
    Mat2 Gamma{};

    static MixingHamiltonian cpt_symmetric(double m_K, double gamma,
                                           complex M12, complex Gamma12);

    complex h(int i, int j) const;   // (M - i/2 Gamma)_{ij}

    /// Hermiticity of M and Gamma to relative tolerance 1e-12; with
    /// require_cpt also equality of the diagonals.
    void validate(bool require_cpt = false) const;
};

struct EigenSystem {
    complex lambda_S, lambda_L;      // lambda = m - i/2 Gamma
    double m_S, m_L;
    double gamma_S, gamma_L;
    double delta_m;                  // m_L - m_S, >= 0 by branch choice
    double delta_gamma;              // Gamma_L - Gamma_S
};

struct XYDecomposition {
    complex X;                       // dimensionless
    complex Y;                       // MeV; delta_m = 2 Re Y
};

/// Closed-form eigenvalues lambda_{S/L} = m_K - i Gamma/2 -/+ sqrt(h12 h21).
/// The square-root branch is fixed so that delta_m >= 0.
/// Throws std::invalid_argument for a non-CPT-symmetric Hamiltonian.
EigenSystem eigensystem(const MixingHamiltonian& h);

/// epsilon = (h12 - h21) / (h12 + h21); throws std::domain_error when the
/// denominator vanishes.
complex cp_epsilon(const MixingHamiltonian& h);

/// Y = sqrt(h12 h21) (same branch as eigensystem), X = Y / h12, so that
/// Y/X = h12 and X Y = h21. Throws std::domain_error when h12 = 0.
XYDecomposition xy_decomposition(const MixingHamiltonian& h);

enum class MassEigenstate { S, L };

/// Time-evolution factor exp(-i m t - Gamma t / 2) of one mass eigenstate.
complex evolve_mass_eigenstate(MassEigenstate which, double t, const EigenSystem& es);

/// P(K0 at t | K0 at 0) = 1/4 (e^{-Gs t} + e^{-Gl t} + 2 cos(dm t) e^{-G t}),
/// G = (Gs + Gl)/2.
double survival_probability(double t, const units::KaonParameters& p);

/// P(K0bar at t | K0 at 0), with the |1-eps|^2 / (4|1+eps|^2) prefactor.
double transition_probability(double t, const units::KaonParameters& p);

/// (P(K0) - P(K0bar)) / (P(K0) + P(K0bar)) in the closed cos/cosh form;
/// approaches 2 Re(eps)/(1+|eps|^2) at large t.
double asymmetry(double t, const units::KaonParameters& p);

/// Long-time asymmetry limit 2 Re(eps) / (1 + |eps|^2).
double asymmetry_asymptote(const units::KaonParameters& p);

/// CSL-damped interference rate gamma_csl dm^2 / (16 pi^{3/2} r_C^3 m0^2), MeV.
double csl_damping_rate(const units::KaonParameters& p);

/// Survival probability with the interference term damped by
/// exp(-csl_damping_rate * t). Identical to survival_probability when
/// gamma_csl = 0.
double csl_survival_probability(double t, const units::KaonParameters& p);

/// delta_m -> (1 - k Delta_SN) delta_m with k = 1 (scenario 1, shared
/// spatial wave-function) or k = 2 (scenario 2, distinct wave-functions);
/// a is the Gaussian width in natural length units. Only delta_m changes.
units::KaonParameters sn_shifted_parameters(const units::KaonParameters& p,
                                            int scenario, double a);

/// Build a CPT-symmetric Hamiltonian whose eigensystem reproduces the
/// given delta_m, widths and epsilon.
MixingHamiltonian hamiltonian_from_parameters(const units::KaonParameters& p);

/// Lab-frame propagation distance and velocity (beta = v/c) to proper
/// time in seconds: tau = x sqrt(1 - beta^2) / (beta c).
double proper_time_from_lab(double distance_m, double beta);

} // namespace ksn::flavor

#endif
