// CSV / JSON writers. Data bodies are deterministic; the provenance
// header carries a 'generated' timestamp which consumers must ignore
// when comparing outputs.

#ifndef KSN_IO_HPP
#define KSN_IO_HPP

#include "ksn/solver.hpp"

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace ksn::io {

/// Ordered key/value provenance block embedded in every output file.
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Shortest exact decimal representation (round-trips to the same double).
std::string format_double(double v);

std::string iso8601_now();

void write_csv_header(std::ostream& os, const std::string& command, const Provenance& prov);

void write_evolution_csv(std::ostream& os, const solver::EvolutionResult& r,
                         const Provenance& prov);

/// Self-describing JSON envelope: provenance echo + observable arrays.
std::string evolution_to_json(const solver::EvolutionResult& r, const Provenance& prov);

} // namespace ksn::io

#endif
