// Physical constants, kaon parameters and SI <-> natural-unit conversions.
//
// Everything downstream computes in natural units, hbar = c = 1, with
// energies and masses in MeV, lengths and times in MeV^-1. SI values
// appear only at API boundaries (CLI flags, config files, reports).

#ifndef KSN_UNITS_HPP
#define KSN_UNITS_HPP

#include <complex>
#include <iosfwd>
#include <string>

namespace ksn::units {

/// CODATA 2018 constants in SI units. h, c and e are exact by definition.
struct PhysicalConstants {
    double h = 6.62607015e-34;        // Planck constant, J s
    double c = 299792458.0;           // speed of light, m/s
    double e = 1.602176634e-19;       // elementary charge, C
    double G = 6.67430e-11;           // gravitational constant, m^3 kg^-1 s^-2

    double hbar() const;              // J s
    double mev_in_joule() const { return e * 1e6; }
    double hbar_mev_s() const;        // MeV s
    double hbar_c_mev_m() const;      // MeV m
};

const PhysicalConstants& constants();

/// Gravitational constant in natural units, MeV^-2.
double g_natural();

enum class Dimension { length, time, mass, energy, action };

Dimension dimension_from_string(const std::string& name);
const char* to_string(Dimension d);

/// SI value -> natural units (MeV powers). length,time: m,s -> MeV^-1;
/// mass: kg -> MeV; energy: J -> MeV; action: J s -> units of hbar.
double to_natural(double si_value, Dimension d);

/// Inverse of to_natural.
double from_natural(double natural_value, Dimension d);

/// Which value of the K_L - K_S mass difference to use for the defaults.
enum class DeltaMSource {
    pdg,           // 3.484e-12 MeV, the measured scale
    literal_3p483  // 3.483 MeV, as sometimes quoted without the 1e-12 factor
};

/// Two-state kaon parameters. All energies in MeV (natural units); the
/// CSL fields are stored in natural units as well (r_C in MeV^-1,
/// gamma_csl in MeV^-2, i.e. volume/time with hbar = c = 1).
/// Immutable value type once constructed; safe to share across threads.
struct KaonParameters {
    double m_K = 0;                    // rest mass, MeV
    double delta_m = 0;                // m_L - m_S, MeV
    double gamma_S = 0;                // K_S width, MeV
    double gamma_L = 0;                // K_L width, MeV
    std::complex<double> epsilon;      // CP-violation parameter
    double m0 = 0;                     // CSL reference mass, MeV
    double gamma_csl = 0;              // CSL collapse parameter, MeV^-2
    double r_C = 0;                    // CSL coherence length, MeV^-1

    double tau_S_seconds() const;      // hbar / gamma_S
    double tau_L_seconds() const;

    /// Throws std::invalid_argument when m_K <= 0, delta_m <= 0,
    /// |epsilon| >= 1 or any width/CSL scale is negative.
    void validate() const;
};

/// PDG-sourced defaults: m_K = 497.614 MeV, tau_S = 8.954e-11 s,
/// tau_L = 5.116e-8 s, |eps| = 2.228e-3 at 43.5 deg, and CSL parameters
/// gamma = lambda_GRW (4 pi)^{3/2} r_C^3 with lambda_GRW = 1e-16 s^-1,
/// r_C = 1e-7 m, m0 = proton mass.
KaonParameters default_kaon_parameters(DeltaMSource dm = DeltaMSource::pdg);

/// Parse a key=value parameter file ('#' comments and blank lines allowed).
/// Recognized keys: m_K_MeV, delta_m_MeV, tau_S_s, tau_L_s, eps_re, eps_im,
/// csl_gamma (m^3/s), csl_rC_m, csl_m0_MeV. Unknown keys and malformed
/// lines raise config_error with the line number.
KaonParameters load_kaon_parameters(std::istream& in,
                                    const KaonParameters& base);
KaonParameters load_kaon_parameters_file(const std::string& path,
                                         const KaonParameters& base);

} // namespace ksn::units

#endif
