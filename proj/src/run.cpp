#include "ksn/run.hpp"

#include "ksn/errors.hpp"
#include "ksn/flavor.hpp"
#include "ksn/gravity.hpp"
#include "ksn/io.hpp"
#include "ksn/solver.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ksn::cli {

using io::format_double;
using io::Provenance;
using nlohmann::json;

Command command_from_string(const std::string& name)
{
    if (name == "oscillate") return Command::oscillate;
    if (name == "asymmetry") return Command::asymmetry;
    if (name == "csl") return Command::csl;
    if (name == "shift") return Command::shift;
    if (name == "potential-check") return Command::potential_check;
    if (name == "solve") return Command::solve;
    if (name == "doublet-check") return Command::doublet_check;
    if (name == "critical-width") return Command::critical_width;
    throw config_error("unknown command: " + name);
}

units::KaonParameters parse_config(const std::string& path)
{
    return units::load_kaon_parameters_file(path, units::default_kaon_parameters());
}

namespace {

/// SI view of the gamma_csl stored in natural units.
double csl_gamma_si(const units::KaonParameters& p)
{
    const double l3 = std::pow(units::to_natural(1.0, units::Dimension::length), 3);
    const double t1 = units::to_natural(1.0, units::Dimension::time);
    return p.gamma_csl / (l3 / t1);
}

Provenance parameter_provenance(const units::KaonParameters& p)
{
    Provenance prov;
    prov.emplace_back("m_K_MeV", format_double(p.m_K));
    prov.emplace_back("delta_m_MeV", format_double(p.delta_m));
    prov.emplace_back("tau_S_s", format_double(p.tau_S_seconds()));
    prov.emplace_back("tau_L_s", format_double(p.tau_L_seconds()));
    prov.emplace_back("eps_re", format_double(p.epsilon.real()));
    prov.emplace_back("eps_im", format_double(p.epsilon.imag()));
    prov.emplace_back("csl_gamma", format_double(csl_gamma_si(p)));
    prov.emplace_back("csl_rC_m", format_double(units::from_natural(p.r_C, units::Dimension::length)));
    prov.emplace_back("csl_m0_MeV", format_double(p.m0));
    return prov;
}

json provenance_json(const Provenance& prov)
{
    json j;
    for (const auto& [k, v] : prov) j[k] = v;
    return j;
}

class Output {
public:
    explicit Output(const std::string& path) : path_(path)
    {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw io_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
    void finish()
    {
        stream().flush();
        if (path_ != "-" && !file_) throw io_error("error writing output file: " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
};

void run_oscillate(const RunSpec& spec)
{
    const auto& p = spec.params;
    const double unit = spec.time_in_seconds
                            ? units::to_natural(1.0, units::Dimension::time)
                            : 1.0 / p.gamma_S;  // tau_S in natural units
    Output out(spec.out_path);
    auto prov = parameter_provenance(p);
    prov.emplace_back("time_unit", spec.time_in_seconds ? "s" : "tau_S");
    prov.emplace_back("t_max", format_double(spec.t_max));
    prov.emplace_back("points", std::to_string(spec.points));
    io::write_csv_header(out.stream(), "oscillate", prov);
    out.stream() << "t,P_K0,P_K0bar,asymmetry\n";
    for (int i = 0; i <= spec.points; ++i) {
        const double t = spec.t_max * double(i) / double(spec.points);
        const double tn = t * unit;
        out.stream() << format_double(t) << ',' << format_double(flavor::survival_probability(tn, p))
                     << ',' << format_double(flavor::transition_probability(tn, p)) << ','
                     << format_double(flavor::asymmetry(tn, p)) << "\n";
    }
    out.finish();
}

void run_asymmetry(const RunSpec& spec)
{
    const auto& p = spec.params;
    const double unit = spec.time_in_seconds
                            ? units::to_natural(1.0, units::Dimension::time)
                            : 1.0 / p.gamma_S;
    Output out(spec.out_path);
    auto prov = parameter_provenance(p);
    prov.emplace_back("time_unit", spec.time_in_seconds ? "s" : "tau_S");
    prov.emplace_back("t_max", format_double(spec.t_max));
    prov.emplace_back("points", std::to_string(spec.points));
    prov.emplace_back("asymptote", format_double(flavor::asymmetry_asymptote(p)));
    io::write_csv_header(out.stream(), "asymmetry", prov);
    out.stream() << "t,asymmetry\n";
    for (int i = 0; i <= spec.points; ++i) {
        const double t = spec.t_max * double(i) / double(spec.points);
        out.stream() << format_double(t) << ',' << format_double(flavor::asymmetry(t * unit, p))
                     << "\n";
    }
    out.finish();
}

void run_csl(const RunSpec& spec)
{
    const auto& p = spec.params;
    const double unit = spec.time_in_seconds
                            ? units::to_natural(1.0, units::Dimension::time)
                            : 1.0 / p.gamma_S;
    const double rate = flavor::csl_damping_rate(p);
    Output out(spec.out_path);
    auto prov = parameter_provenance(p);
    prov.emplace_back("time_unit", spec.time_in_seconds ? "s" : "tau_S");
    prov.emplace_back("t_max", format_double(spec.t_max));
    prov.emplace_back("points", std::to_string(spec.points));
    prov.emplace_back("csl_damping_rate_MeV", format_double(rate));
    prov.emplace_back("csl_damping_rate_per_s",
                      format_double(rate * units::to_natural(1.0, units::Dimension::time)));
    io::write_csv_header(out.stream(), "csl", prov);
    out.stream() << "t,P_K0,P_K0_csl\n";
    for (int i = 0; i <= spec.points; ++i) {
        const double t = spec.t_max * double(i) / double(spec.points);
        const double tn = t * unit;
        out.stream() << format_double(t) << ',' << format_double(flavor::survival_probability(tn, p))
                     << ',' << format_double(flavor::csl_survival_probability(tn, p)) << "\n";
    }
    out.finish();
}

void run_shift(const RunSpec& spec)
{
    const auto& p = spec.params;
    const double a_nat = units::to_natural(spec.width_m, units::Dimension::length);
    const double dsn = gravity::delta_sn(p.m_K, a_nat);
    const auto shifted = flavor::sn_shifted_parameters(p, spec.scenario, a_nat);
    const auto es = gravity::energy_shift(spec.scenario, p, a_nat, spec.beta_sq);
    json j;
    j["command"] = "shift";
    j["generated"] = io::iso8601_now();
    j["provenance"] = provenance_json(parameter_provenance(p));
    j["scenario"] = spec.scenario;
    j["beta_sq"] = spec.beta_sq;
    j["width_m"] = spec.width_m;
    j["width_natural_MeV_inv"] = a_nat;
    j["delta_sn"] = dsn;
    j["delta_m_MeV"] = p.delta_m;
    j["delta_m_shifted_MeV"] = shifted.delta_m;
    // computed directly; the subtraction underflows at the physical coupling
    j["delta_m_shift_MeV"] = (spec.scenario == 2 ? 2.0 : 1.0) * dsn * p.delta_m;
    j["delta_E_S_MeV"] = es.delta_E_S;
    j["delta_E_L_MeV"] = es.delta_E_L;
    j["critical_width_m"] =
        units::from_natural(gravity::critical_width(p.m_K), units::Dimension::length);
    Output out(spec.out_path);
    out.stream() << j.dump(2) << "\n";
    out.finish();
}

void run_critical_width(const RunSpec& spec)
{
    const auto& p = spec.params;
    const double a_star = gravity::critical_width(p.m_K);
    json j;
    j["command"] = "critical-width";
    j["generated"] = io::iso8601_now();
    j["provenance"] = provenance_json(parameter_provenance(p));
    j["m_K_MeV"] = p.m_K;
    j["critical_width_m"] = units::from_natural(a_star, units::Dimension::length);
    j["critical_width_natural_MeV_inv"] = a_star;
    j["delta_sn_at_critical"] = gravity::delta_sn(p.m_K, a_star);
    j["delta_sn_at_1m"] =
        gravity::delta_sn(p.m_K, units::to_natural(1.0, units::Dimension::length));
    Output out(spec.out_path);
    out.stream() << j.dump(2) << "\n";
    out.finish();
}

void run_potential_check(const RunSpec& spec)
{
    const double radii_over_a[] = {0.0, 0.5, 1.0, 2.0, 10.0};
    const double thetas[] = {0.0, 0.1, 1.0, 5.0, 50.0};
    const double widths[] = {0.1, 1.0, 10.0};
    const double m = 1.0;

    Output out(spec.out_path);
    Provenance prov;
    prov.emplace_back("quad_rel_tol", format_double(spec.quad_rel_tol));
    prov.emplace_back("mass_expansion_regime", "theta >= 10");
    prov.emplace_back("time_expansion_regime", "theta <= 0.1");
    prov.emplace_back("width_expansion_regime", "r/a <= 0.5 and theta <= 0.1");
    io::write_csv_header(out.stream(), "potential-check", prov);
    out.stream() << "a,r_over_a,theta,f_closed,f_quadrature,quad_est_err,rel_diff,"
                    "mass_exp_rel_err,time_exp_rel_err,width_exp_rel_err\n";

    double worst = 0.0;
    for (double a : widths)
        for (double th : thetas)
            for (double x : radii_over_a) {
                const gravity::GaussianState s(a, m, th * m * a * a);
                const double r = x * a;
                const auto closed = gravity::potential_f_closed(s, r);
                const auto quad =
                    gravity::potential_f_quadrature(s, r, 0.01 * spec.quad_rel_tol * closed.value);
                const double rel = std::abs(quad.value - closed.value) / closed.value;
                worst = std::max(worst, rel);
                out.stream() << format_double(a) << ',' << format_double(x) << ','
                             << format_double(th) << ',' << format_double(closed.value) << ','
                             << format_double(quad.value) << ','
                             << format_double(quad.estimated_error) << ',' << format_double(rel);
                if (th >= 10.0) {
                    const auto e = gravity::potential_f_mass_expansion(s, r);
                    out.stream() << ',' << format_double(std::abs(e.value - closed.value) / closed.value);
                } else {
                    out.stream() << ',';
                }
                if (th <= 0.1) {
                    const auto e = gravity::potential_f_time_expansion(s, r);
                    out.stream() << ',' << format_double(std::abs(e.value - closed.value) / closed.value);
                } else {
                    out.stream() << ',';
                }
                if (x <= 0.5 && th <= 0.1) {
                    const auto e = gravity::potential_f_width_expansion(s, r);
                    out.stream() << ',' << format_double(std::abs(e.value - closed.value) / closed.value);
                } else {
                    out.stream() << ',';
                }
                out.stream() << "\n";
            }
    out.finish();
    if (worst > spec.quad_rel_tol)
        throw convergence_error("potential-check: closed vs quadrature disagreement "
                                + format_double(worst) + " exceeds tolerance");
}

solver::ScenarioConfig solve_config(const RunSpec& spec)
{
    solver::RadialGrid grid{spec.r_max, spec.grid_n};
    auto cfg = solver::make_scenario_config(spec.scenario, spec.solve_mass, spec.solve_delta_m,
                                            spec.a_natural, grid, spec.dt);
    const double b2 = std::clamp(spec.beta_sq, 0.0, 1.0);
    cfg.alpha0 = std::sqrt(1.0 - b2);
    cfg.beta0 = std::sqrt(b2);
    cfg.include_decay_weights = spec.decay_weights;
    cfg.gravity_on = true;
    cfg.g_multiplier = spec.coupling
                           ? solver::g_multiplier_for_coupling(*spec.coupling, spec.solve_mass,
                                                               spec.a_natural)
                           : spec.g_multiplier;
    cfg.corrector_passes = spec.corrector_passes;
    return cfg;
}

Provenance solve_provenance(const RunSpec& spec, const solver::ScenarioConfig& cfg)
{
    Provenance prov;
    prov.emplace_back("scenario", std::to_string(cfg.scenario));
    prov.emplace_back("mass_MeV", format_double(spec.solve_mass));
    prov.emplace_back("delta_m_MeV", format_double(spec.solve_delta_m));
    prov.emplace_back("width_natural", format_double(spec.a_natural));
    prov.emplace_back("grid_n", std::to_string(spec.grid_n));
    prov.emplace_back("r_max", format_double(spec.r_max));
    prov.emplace_back("dt", format_double(spec.dt));
    prov.emplace_back("t_final", format_double(spec.t_final));
    prov.emplace_back("beta_sq", format_double(spec.beta_sq));
    prov.emplace_back("g_multiplier", format_double(cfg.g_multiplier));
    prov.emplace_back("coupling",
                      format_double(cfg.g_multiplier * units::g_natural()
                                    * std::pow(spec.solve_mass, 3) * spec.a_natural));
    prov.emplace_back("decay_weights", spec.decay_weights ? "1" : "0");
    prov.emplace_back("corrector_passes", std::to_string(spec.corrector_passes));
    return prov;
}

void run_solve(const RunSpec& spec)
{
    const auto cfg = solve_config(spec);
    const auto result = solver::evolve(cfg, spec.t_final, spec.output_stride);
    const auto prov = solve_provenance(spec, cfg);
    Output out(spec.out_path);
    if (spec.format == "json")
        out.stream() << io::evolution_to_json(result, prov);
    else
        io::write_evolution_csv(out.stream(), result, prov);
    out.finish();
}

void run_doublet_check(const RunSpec& spec)
{
    solver::RadialGrid grid{spec.r_max, spec.grid_n};
    const double m1 = spec.solve_mass;
    const double m2 = spec.solve_mass + spec.solve_delta_m;
    auto psi1 = solver::init_gaussian(grid, spec.a_natural, m1);
    auto psi2 = solver::init_gaussian(grid, 1.3 * spec.a_natural, m2);
    for (auto& v : psi1.u) v *= std::sqrt(0.5);
    for (auto& v : psi2.u) v *= std::sqrt(0.5);
    const double g_eff = (spec.coupling ? solver::g_multiplier_for_coupling(
                              *spec.coupling, spec.solve_mass, spec.a_natural)
                                        : spec.g_multiplier)
                         * units::g_natural();

    std::vector<double> m21, c21, c12;
    for (int i = 0; i < spec.doublet_points; ++i) {
        const double frac = spec.m21_max_fraction * double(i) / double(spec.doublet_points - 1);
        solver::DoubletMatrices dm;
        dm.M[0][0] = m1;
        dm.M[1][1] = m2;
        dm.M[1][0] = frac * m1;
        dm.M[0][1] = frac * m1;
        dm.T[0][0] = m1;
        dm.T[1][1] = m2;
        const auto res = solver::doublet_residuals(dm, psi1, psi2, g_eff);
        m21.push_back(frac * m1);
        c21.push_back(res.constraint_21);
        c12.push_back(res.constraint_12);
    }

    // least-squares line through the sweep
    double xm = 0, ym = 0;
    for (std::size_t i = 0; i < m21.size(); ++i) { xm += m21[i]; ym += c21[i]; }
    xm /= double(m21.size());
    ym /= double(m21.size());
    double sxy = 0, sxx = 0, sst = 0;
    for (std::size_t i = 0; i < m21.size(); ++i) {
        sxy += (m21[i] - xm) * (c21[i] - ym);
        sxx += (m21[i] - xm) * (m21[i] - xm);
        sst += (c21[i] - ym) * (c21[i] - ym);
    }
    const double slope = sxy / sxx;
    const double intercept = ym - slope * xm;
    double ssr = 0;
    for (std::size_t i = 0; i < m21.size(); ++i) {
        const double e = c21[i] - (slope * m21[i] + intercept);
        ssr += e * e;
    }
    const double r2 = (sst > 0) ? 1.0 - ssr / sst : 1.0;

    json j;
    j["command"] = "doublet-check";
    j["generated"] = io::iso8601_now();
    j["m1_MeV"] = m1;
    j["m2_MeV"] = m2;
    j["g_eff_MeV^-2"] = g_eff;
    j["m21_MeV"] = m21;
    j["constraint_21"] = c21;
    j["constraint_12"] = c12;
    j["fit_slope"] = slope;
    j["fit_intercept"] = intercept;
    j["fit_r2"] = r2;
    j["diagonal_constraint_21"] = c21.front();
    Output out(spec.out_path);
    out.stream() << j.dump(2) << "\n";
    out.finish();
}

} // namespace

int run(const RunSpec& spec)
{
    spec.params.validate();
    if (spec.format != "csv" && spec.format != "json")
        throw config_error("unknown output format: " + spec.format);
    if (spec.points < 1) throw config_error("need at least one curve interval");
    if (spec.doublet_points < 2) throw config_error("need at least two sweep points");
    if (spec.output_stride < 1) throw config_error("stride must be >= 1");
    switch (spec.command) {
        case Command::oscillate: run_oscillate(spec); break;
        case Command::asymmetry: run_asymmetry(spec); break;
        case Command::csl: run_csl(spec); break;
        case Command::shift: run_shift(spec); break;
        case Command::potential_check: run_potential_check(spec); break;
        case Command::solve: run_solve(spec); break;
        case Command::doublet_check: run_doublet_check(spec); break;
        case Command::critical_width: run_critical_width(spec); break;
    }
    return 0;
}

} // namespace ksn::cli
