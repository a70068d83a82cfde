// kaon-sn command line front end.
//
// Exit codes: 0 ok, 2 configuration error, 3 numeric non-convergence,
// 4 I/O error.

#include "ksn/errors.hpp"
#include "ksn/run.hpp"
#include "ksn/units.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv)
{
    CLI::App app{"Flavor oscillations and Newtonian self-gravity of the neutral kaon"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    ksn::cli::RunSpec spec;
    std::string config_path;
    std::optional<double> coupling;
    // flag overrides applied on top of defaults/config file
    std::optional<double> delta_m_override, m_k_override;
    bool literal_delta_m = false;

    app.add_option("--config", config_path, "key=value parameter file");
    app.add_option("--out", spec.out_path, "output path ('-' = stdout)");
    app.add_option("--format", spec.format, "csv|json");
    app.add_flag("--literal-delta-m", literal_delta_m,
                 "use the literal 3.483 MeV mass difference instead of the PDG 3.484e-12 MeV");
    app.add_option("--delta-m", delta_m_override, "override delta_m (MeV)");
    app.add_option("--m-k", m_k_override, "override m_K (MeV)");

    auto add_curve_options = [&](CLI::App* c) {
        c->add_option("--t-max", spec.t_max, "maximum proper time (tau_S units by default)");
        c->add_option("--points", spec.points, "number of curve intervals");
        c->add_flag("--seconds", spec.time_in_seconds, "time axis in seconds");
    };
    auto add_solver_options = [&](CLI::App* c) {
        c->add_option("--grid-n", spec.grid_n, "radial grid intervals");
        c->add_option("--r-max", spec.r_max, "domain size (natural units)");
        c->add_option("--width", spec.a_natural, "initial Gaussian width a (natural units)");
        c->add_option("--dt", spec.dt, "time step (natural units)");
        c->add_option("--t-final", spec.t_final, "final time (natural units)");
        c->add_option("--stride", spec.output_stride, "record every N steps");
        c->add_option("--g-multiplier", spec.g_multiplier, "multiply G by this factor");
        c->add_option("--coupling", coupling,
                      "dimensionless kappa = G_eff m^3 a (overrides --g-multiplier)");
        c->add_option("--mass", spec.solve_mass, "kinetic mass (MeV)");
        c->add_option("--solver-delta-m", spec.solve_delta_m, "mass splitting (MeV)");
        c->add_option("--beta-sq", spec.beta_sq, "|beta|^2 occupation of the L component");
        c->add_flag("--decay-weights", spec.decay_weights,
                    "damp the source weights by e^{-Gamma t}");
        c->add_option("--corrector-passes", spec.corrector_passes, "nonlinear corrector passes");
        c->add_option("--scenario", spec.scenario, "1: shared wave-function, 2: distinct");
    };

    auto* osc = app.add_subcommand("oscillate", "survival/transition probabilities and asymmetry");
    add_curve_options(osc);
    auto* asym = app.add_subcommand("asymmetry", "flavor asymmetry curve");
    add_curve_options(asym);
    auto* csl = app.add_subcommand("csl", "CSL-damped vs undamped survival probability");
    add_curve_options(csl);

    auto* shift = app.add_subcommand("shift", "self-gravity shift of delta_m (JSON)");
    shift->add_option("--scenario", spec.scenario, "1 or 2");
    shift->add_option("--width", spec.width_m, "Gaussian width in meters");
    shift->add_option("--beta-sq", spec.beta_sq, "|beta|^2 for the energy shifts");

    auto* pot = app.add_subcommand("potential-check",
                                   "closed form vs quadrature vs expansions table");
    pot->add_option("--tol", spec.quad_rel_tol, "relative closed-vs-quadrature tolerance");

    auto* solve = app.add_subcommand("solve", "radial Schroedinger-Newton evolution");
    add_solver_options(solve);

    auto* doublet = app.add_subcommand("doublet-check",
                                       "doublet-formalism constraint residuals (JSON)");
    add_solver_options(doublet);
    doublet->add_option("--m21-max", spec.m21_max_fraction, "largest |M21| as a fraction of M11");
    doublet->add_option("--sweep-points", spec.doublet_points, "number of M21 values");

    auto* crit = app.add_subcommand("critical-width", "width where Delta_SN = 1 (JSON)");
    (void)crit;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return (rc == 0) ? 0 : 2;
    }

    try {
        using ksn::units::DeltaMSource;
        spec.params = ksn::units::default_kaon_parameters(
            literal_delta_m ? DeltaMSource::literal_3p483 : DeltaMSource::pdg);
        if (!config_path.empty())
            spec.params = ksn::units::load_kaon_parameters_file(config_path, spec.params);
        if (m_k_override) spec.params.m_K = *m_k_override;
        if (delta_m_override) spec.params.delta_m = *delta_m_override;
        spec.coupling = coupling;

        if (osc->parsed()) spec.command = ksn::cli::Command::oscillate;
        else if (asym->parsed()) spec.command = ksn::cli::Command::asymmetry;
        else if (csl->parsed()) spec.command = ksn::cli::Command::csl;
        else if (shift->parsed()) spec.command = ksn::cli::Command::shift;
        else if (pot->parsed()) spec.command = ksn::cli::Command::potential_check;
        else if (solve->parsed()) spec.command = ksn::cli::Command::solve;
        else if (doublet->parsed()) spec.command = ksn::cli::Command::doublet_check;
        else spec.command = ksn::cli::Command::critical_width;

        return ksn::cli::run(spec);
    } catch (const ksn::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ksn::convergence_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const ksn::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
