#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "abdesign/types.hpp"

namespace abdesign {

/// Fraction of positions where generated and reference types match.
double aar(const CdrState& gen, const CdrState& ref);

/// Root mean square C-alpha deviation, computed in the shared framework
/// coordinate frame with no superposition: the loop is generated inside a
/// fixed framework, so the frames already coincide.
double rmsd(const CdrState& gen, const CdrState& ref);

/// Per-design summary emitted by the sampling pipelines.
struct DesignReport {
    std::optional<double> aar;   // in [0,1]; absent when no reference was given
    std::optional<double> rmsd;  // Angstrom, >= 0; absent when no reference
    std::map<std::string, double> rewards;
    std::uint64_t queries_used = 0;
};

}  // namespace abdesign
