#include "ksn/flavor.hpp"
#include "ksn/gravity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksn::flavor {

namespace {

double max_abs(const Mat2& m)
{
    double s = 0;
    for (const auto& row : m)
        for (const auto& x : row) s = std::max(s, std::abs(x));
    return s;
}

void check_hermitian(const Mat2& m, const char* name, double scale)
{
    const double tol = 1e-12 * std::max(scale, 1e-300);
    if (std::abs(m[0][0].imag()) > tol || std::abs(m[1][1].imag()) > tol
        || std::abs(m[0][1] - std::conj(m[1][0])) > tol)
        throw std::invalid_argument(std::string(name) + " matrix is not Hermitian");
}

/// sqrt(h12 h21) on the branch with non-negative real part, so delta_m >= 0.
complex branch_root(const MixingHamiltonian& h)
{
    complex s = std::sqrt(h.h(0, 1) * h.h(1, 0));
    if (s.real() < 0) s = -s;
    return s;
}

} // namespace

MixingHamiltonian MixingHamiltonian::cpt_symmetric(double m_K, double gamma,
                                                   complex M12, complex Gamma12)
{
    MixingHamiltonian h;
    h.M = {{{complex(m_K), M12}, {std::conj(M12), complex(m_K)}}};
    h.Gamma = {{{complex(gamma), Gamma12}, {std::conj(Gamma12), complex(gamma)}}};
    return h;
}

complex MixingHamiltonian::h(int i, int j) const
{
    return M[i][j] - complex(0, 0.5) * Gamma[i][j];
}

void MixingHamiltonian::validate(bool require_cpt) const
{
    const double scale = std::max(max_abs(M), max_abs(Gamma));
    check_hermitian(M, "mass", scale);
    check_hermitian(Gamma, "decay", scale);
    if (require_cpt) {
        const double tol = 1e-12 * std::max(scale, 1e-300);
        if (std::abs(M[0][0] - M[1][1]) > tol || std::abs(Gamma[0][0] - Gamma[1][1]) > tol)
            throw std::invalid_argument("Hamiltonian diagonals differ: not CPT symmetric");
    }
}

EigenSystem eigensystem(const MixingHamiltonian& h)
{
    h.validate(true);
    const complex diag = h.h(0, 0);
    const complex s = branch_root(h);
    EigenSystem es;
    es.lambda_S = diag - s;
    es.lambda_L = diag + s;
    es.m_S = es.lambda_S.real();
    es.m_L = es.lambda_L.real();
    es.gamma_S = -2.0 * es.lambda_S.imag();
    es.gamma_L = -2.0 * es.lambda_L.imag();
    es.delta_m = 2.0 * s.real();
    es.delta_gamma = -4.0 * s.imag();
    return es;
}

complex cp_epsilon(const MixingHamiltonian& h)
{
    h.validate();
    const complex w = h.h(0, 1);
    const complex v = h.h(1, 0);
    if (std::abs(w + v) == 0.0)
        throw std::domain_error("cp_epsilon: vanishing denominator h12 + h21");
    return (w - v) / (w + v);
}

XYDecomposition xy_decomposition(const MixingHamiltonian& h)
{
    h.validate();
    const complex w = h.h(0, 1);
    if (std::abs(w) == 0.0)
        throw std::domain_error("xy_decomposition: h12 = 0");
    XYDecomposition d;
    d.Y = branch_root(h);
    d.X = d.Y / w;
    return d;
}

complex evolve_mass_eigenstate(MassEigenstate which, double t, const EigenSystem& es)
{
    if (t < 0) throw std::invalid_argument("evolve_mass_eigenstate: t < 0");
    const complex lambda = (which == MassEigenstate::S) ? es.lambda_S : es.lambda_L;
    return std::exp(complex(0, -1) * lambda * t);
}

namespace {

/// 1/4 (e^{-Gs t} + e^{-Gl t} + 2 cos(dm t) e^{-G t} e^{-xi t}).
/// survival and CSL survival share this path so the xi = 0 case is
/// bit-identical to the undamped formula.
double damped_survival(double t, const units::KaonParameters& p, double xi)
{
    if (t < 0) throw std::invalid_argument("survival_probability: t < 0");
    const double gbar = 0.5 * (p.gamma_S + p.gamma_L);
    const double interference =
        2.0 * std::cos(p.delta_m * t) * std::exp(-gbar * t) * std::exp(-xi * t);
    const double v = 0.25 * (std::exp(-p.gamma_S * t) + std::exp(-p.gamma_L * t) + interference);
    return std::clamp(v, 0.0, 1.0);
}

} // namespace

double survival_probability(double t, const units::KaonParameters& p)
{
    return damped_survival(t, p, 0.0);
}

double transition_probability(double t, const units::KaonParameters& p)
{
    if (t < 0) throw std::invalid_argument("transition_probability: t < 0");
    const double gbar = 0.5 * (p.gamma_S + p.gamma_L);
    const double pref = std::norm(1.0 - p.epsilon) / (4.0 * std::norm(1.0 + p.epsilon));
    const double v = pref * (std::exp(-p.gamma_S * t) + std::exp(-p.gamma_L * t)
                             - 2.0 * std::cos(p.delta_m * t) * std::exp(-gbar * t));
    // the bracket is non-negative by AM-GM; the formula only stays below 1
    // on the physical domain (small |eps|), so no upper clamp
    return std::max(v, 0.0);
}

double asymmetry_asymptote(const units::KaonParameters& p)
{
    return 2.0 * p.epsilon.real() / (1.0 + std::norm(p.epsilon));
}

double asymmetry(double t, const units::KaonParameters& p)
{
    if (t < 0) throw std::invalid_argument("asymmetry: t < 0");
    if (std::exp(-p.gamma_S * t) == 0.0 && std::exp(-p.gamma_L * t) == 0.0)
        throw std::domain_error("asymmetry: both probabilities underflow at this t");
    const double r = asymmetry_asymptote(p);
    // cos(dm t) / cosh(dGamma t / 2); cosh overflow drives this to 0,
    // which is the correct long-time limit.
    const double osc = std::cos(p.delta_m * t) / std::cosh(0.5 * (p.gamma_L - p.gamma_S) * t);
    return (r + osc) / (1.0 + r * osc);
}

double csl_damping_rate(const units::KaonParameters& p)
{
    if (!(p.r_C > 0) || !(p.m0 > 0))
        throw std::invalid_argument("csl_damping_rate: r_C and m0 must be positive");
    if (p.gamma_csl == 0.0) return 0.0;
    return p.gamma_csl * p.delta_m * p.delta_m
           / (16.0 * std::pow(M_PI, 1.5) * std::pow(p.r_C, 3) * p.m0 * p.m0);
}

double csl_survival_probability(double t, const units::KaonParameters& p)
{
    return damped_survival(t, p, csl_damping_rate(p));
}

units::KaonParameters sn_shifted_parameters(const units::KaonParameters& p,
                                            int scenario, double a)
{
    if (scenario != 1 && scenario != 2)
        throw std::invalid_argument("sn_shifted_parameters: scenario must be 1 or 2");
    if (!(a > 0)) throw std::invalid_argument("sn_shifted_parameters: width must be positive");
    const double k = (scenario == 2) ? 2.0 : 1.0;
    units::KaonParameters out = p;
    // shift computed as k * (Delta_SN * delta_m) so scenario 2 is exactly
    // twice scenario 1 in floating point
    out.delta_m = p.delta_m - k * (gravity::delta_sn(p.m_K, a) * p.delta_m);
    return out;
}

MixingHamiltonian hamiltonian_from_parameters(const units::KaonParameters& p)
{
    const double gbar = 0.5 * (p.gamma_S + p.gamma_L);
    const double dgamma = p.gamma_L - p.gamma_S;
    const complex Y(0.5 * p.delta_m, -0.25 * dgamma);
    const complex X = std::sqrt((1.0 - p.epsilon) / (1.0 + p.epsilon));
    const complex w = Y / X;       // M12 - i/2 Gamma12
    const complex v = X * Y;       // M12* - i/2 Gamma12*
    const complex M12 = 0.5 * (w + std::conj(v));
    const complex Gamma12 = complex(0, 1) * (w - std::conj(v));
    return MixingHamiltonian::cpt_symmetric(p.m_K, gbar, M12, Gamma12);
}

double proper_time_from_lab(double distance_m, double beta)
{
    if (!(beta > 0) || !(beta < 1))
        throw std::invalid_argument("proper_time_from_lab: beta must be in (0,1)");
    if (distance_m < 0)
        throw std::invalid_argument("proper_time_from_lab: negative distance");
    return distance_m * std::sqrt(1.0 - beta * beta) / (beta * units::constants().c);
}

} // namespace ksn::flavor
