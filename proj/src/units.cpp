#include "ksn/units.hpp"
#include "ksn/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ksn::units {

double PhysicalConstants::hbar() const { return h / (2.0 * M_PI); }
double PhysicalConstants::hbar_mev_s() const { return hbar() / mev_in_joule(); }
double PhysicalConstants::hbar_c_mev_m() const { return hbar_mev_s() * c; }

const PhysicalConstants& constants()
{
    static const PhysicalConstants k{};
    return k;
}

double g_natural()
{
    // G [m^3 kg^-1 s^-2] with m -> MeV^-1, kg -> MeV, s -> MeV^-1
    static const double g = [] {
        const PhysicalConstants& k = constants();
        const double m_to_inv_mev = 1.0 / k.hbar_c_mev_m();
        const double kg_to_mev = k.c * k.c / k.mev_in_joule();
        const double s_to_inv_mev = 1.0 / k.hbar_mev_s();
        return k.G * m_to_inv_mev * m_to_inv_mev * m_to_inv_mev
               / kg_to_mev / (s_to_inv_mev * s_to_inv_mev);
    }();
    return g;
}

Dimension dimension_from_string(const std::string& name)
{
    if (name == "length") return Dimension::length;
    if (name == "time") return Dimension::time;
    if (name == "mass") return Dimension::mass;
    if (name == "energy") return Dimension::energy;
    if (name == "action") return Dimension::action;
    throw std::invalid_argument("unknown dimension tag: " + name);
}

const char* to_string(Dimension d)
{
    switch (d) {
        case Dimension::length: return "length";
        case Dimension::time: return "time";
        case Dimension::mass: return "mass";
        case Dimension::energy: return "energy";
        case Dimension::action: return "action";
    }
    throw std::invalid_argument("unknown dimension tag");
}

namespace {

double conversion_factor(Dimension d)
{
    const PhysicalConstants& k = constants();
    switch (d) {
        case Dimension::length: return 1.0 / k.hbar_c_mev_m();   // m -> MeV^-1
        case Dimension::time:   return 1.0 / k.hbar_mev_s();     // s -> MeV^-1
        case Dimension::mass:   return k.c * k.c / k.mev_in_joule(); // kg -> MeV
        case Dimension::energy: return 1.0 / k.mev_in_joule();   // J -> MeV
        case Dimension::action: return 1.0 / k.hbar();           // J s -> hbar units
    }
    throw std::invalid_argument("unknown dimension tag");
}

} // namespace

double to_natural(double si_value, Dimension d)
{
    return si_value * conversion_factor(d);
}

double from_natural(double natural_value, Dimension d)
{
    return natural_value / conversion_factor(d);
}

double KaonParameters::tau_S_seconds() const
{
    return constants().hbar_mev_s() / gamma_S;
}

double KaonParameters::tau_L_seconds() const
{
    return constants().hbar_mev_s() / gamma_L;
}

void KaonParameters::validate() const
{
    if (!(m_K > 0)) throw std::invalid_argument("KaonParameters: m_K must be positive");
    if (!(delta_m > 0)) throw std::invalid_argument("KaonParameters: delta_m must be positive");
    if (!(gamma_S >= 0) || !(gamma_L >= 0))
        throw std::invalid_argument("KaonParameters: widths must be non-negative");
    if (!(std::abs(epsilon) < 1.0))
        throw std::invalid_argument("KaonParameters: |epsilon| must be < 1");
    if (!(m0 >= 0) || !(gamma_csl >= 0) || !(r_C >= 0))
        throw std::invalid_argument("KaonParameters: CSL parameters must be non-negative");
}

KaonParameters default_kaon_parameters(DeltaMSource dm)
{
    const PhysicalConstants& k = constants();
    KaonParameters p;
    p.m_K = 497.614;
    p.delta_m = (dm == DeltaMSource::pdg) ? 3.484e-12 : 3.483;
    p.gamma_S = k.hbar_mev_s() / 8.954e-11;
    p.gamma_L = k.hbar_mev_s() / 5.116e-8;
    const double abs_eps = 2.228e-3;
    const double phi_eps = 43.5 * M_PI / 180.0;  // superweak phase
    p.epsilon = std::polar(abs_eps, phi_eps);
    p.m0 = 938.27208816;  // proton mass, MeV
    const double lambda_grw = 1e-16;  // s^-1
    const double r_c_m = 1e-7;
    const double gamma_si = lambda_grw * std::pow(4.0 * M_PI, 1.5) * std::pow(r_c_m, 3);
    // m^3 s^-1 -> MeV^-2
    p.gamma_csl = gamma_si * std::pow(to_natural(1.0, Dimension::length), 3)
                  / to_natural(1.0, Dimension::time);
    p.r_C = to_natural(r_c_m, Dimension::length);
    p.validate();
    return p;
}

namespace {

void apply_key(KaonParameters& p, const std::string& key, double value, int line_no)
{
    const PhysicalConstants& k = constants();
    if (key == "m_K_MeV") p.m_K = value;
    else if (key == "delta_m_MeV") p.delta_m = value;
    else if (key == "tau_S_s") p.gamma_S = k.hbar_mev_s() / value;
    else if (key == "tau_L_s") p.gamma_L = k.hbar_mev_s() / value;
    else if (key == "eps_re") p.epsilon = {value, p.epsilon.imag()};
    else if (key == "eps_im") p.epsilon = {p.epsilon.real(), value};
    else if (key == "csl_gamma")
        p.gamma_csl = value * std::pow(to_natural(1.0, Dimension::length), 3)
                      / to_natural(1.0, Dimension::time);
    else if (key == "csl_rC_m") p.r_C = to_natural(value, Dimension::length);
    else if (key == "csl_m0_MeV") p.m0 = value;
    else
        throw config_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KaonParameters load_kaon_parameters(std::istream& in, const KaonParameters& base)
{
    KaonParameters p = base;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw config_error("line " + std::to_string(line_no) + ": expected key=value");
        double value = 0;
        std::size_t consumed = 0;
        try {
            value = std::stod(val, &consumed);
        } catch (const std::exception&) {
            throw config_error("line " + std::to_string(line_no) + ": bad number '" + val + "'");
        }
        if (consumed != val.size())
            throw config_error("line " + std::to_string(line_no) + ": bad number '" + val + "'");
        apply_key(p, key, value, line_no);
    }
    p.validate();
    return p;
}

KaonParameters load_kaon_parameters_file(const std::string& path, const KaonParameters& base)
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    return load_kaon_parameters(in, base);
}

} // namespace ksn::units
