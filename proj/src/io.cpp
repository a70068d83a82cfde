#include "ksn/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <ctime>

namespace ksn::io {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso8601_now()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_csv_header(std::ostream& os, const std::string& command, const Provenance& prov)
{
    os << "# command = " << command << "\n";
    os << "# generated = " << iso8601_now() << "\n";
    for (const auto& [k, v] : prov) os << "# " << k << " = " << v << "\n";
}

void write_evolution_csv(std::ostream& os, const solver::EvolutionResult& r,
                         const Provenance& prov)
{
    write_csv_header(os, "solve", prov);
    os << "t";
    for (const auto& ch : r.channels)
        os << ",norm_" << ch.label << ",r2_" << ch.label << ",ekin_" << ch.label
           << ",epot_" << ch.label << ",phase_" << ch.label;
    os << "\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        os << format_double(r.times[i]);
        for (const auto& ch : r.channels)
            os << ',' << format_double(ch.norm[i]) << ',' << format_double(ch.r_squared[i])
               << ',' << format_double(ch.kinetic[i]) << ',' << format_double(ch.potential[i])
               << ',' << format_double(ch.central_phase[i]);
        os << "\n";
    }
}

std::string evolution_to_json(const solver::EvolutionResult& r, const Provenance& prov)
{
    nlohmann::json j;
    j["command"] = "solve";
    j["generated"] = iso8601_now();
    nlohmann::json p;
    for (const auto& [k, v] : prov) p[k] = v;
    j["provenance"] = p;
    j["dt_used"] = r.dt_used;
    j["times"] = r.times;
    for (const auto& ch : r.channels) {
        nlohmann::json c;
        c["norm"] = ch.norm;
        c["r_squared"] = ch.r_squared;
        c["kinetic"] = ch.kinetic;
        c["potential"] = ch.potential;
        c["central_phase"] = ch.central_phase;
        j["channels"][ch.label] = c;
    }
    return j.dump(2) + "\n";
}

} // namespace ksn::io
