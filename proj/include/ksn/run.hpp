// Command layer shared by the CLI binary and the tests: a RunSpec fully
// determines one experiment and run() produces its output file(s).
// Identical specs produce byte-identical data bodies.

#ifndef KSN_RUN_HPP
#define KSN_RUN_HPP

#include "ksn/units.hpp"

#include <optional>
#include <string>

namespace ksn::cli {

enum class Command {
    oscillate,       // P(K0), P(K0bar), asymmetry vs proper time
    asymmetry,       // asymmetry curve and its CP asymptote
    csl,             // CSL-damped vs undamped survival probability
    shift,           // Delta_SN, shifted delta_m, energy shifts (JSON)
    potential_check, // closed form vs quadrature vs expansions table
    solve,           // radial SN evolution observables
    doublet_check,   // doublet constraint residuals vs |M21| (JSON)
    critical_width   // width where Delta_SN = 1 (JSON)
};

Command command_from_string(const std::string& name);

struct RunSpec {
    Command command = Command::oscillate;
    units::KaonParameters params = units::default_kaon_parameters();
    std::string out_path = "-";          // "-" = stdout
    std::string format = "csv";          // csv | json

    // oscillation-curve options (proper time in units of tau_S by default)
    double t_max = 12.0;
    int points = 600;
    bool time_in_seconds = false;

    // gravity / shift options
    int scenario = 1;
    double width_m = 1.0;                // Gaussian width in meters
    double beta_sq = 0.0;

    // solver options (natural units; these runs are verification-scale)
    int grid_n = 1024;
    double r_max = 16.0;
    double a_natural = 1.0;
    double dt = 0.01;
    double t_final = 1.0;
    int output_stride = 16;
    double g_multiplier = 1.0;
    std::optional<double> coupling;      // kappa = G_eff m^3 a; overrides g_multiplier
    double solve_mass = 500.0;           // MeV
    double solve_delta_m = 25.0;         // MeV
    bool decay_weights = false;
    int corrector_passes = 2;

    // doublet-check options
    double m21_max_fraction = 1.0;
    int doublet_points = 9;

    // potential-check tolerance (relative, closed vs quadrature)
    double quad_rel_tol = 1e-8;
};

/// Kaon parameters from a key=value file layered over the defaults.
units::KaonParameters parse_config(const std::string& path);

/// Execute the spec; writes the output file (or stdout). Throws
/// config_error, convergence_error or io_error; returns 0 on success.
int run(const RunSpec& spec);

} // namespace ksn::cli

#endif
