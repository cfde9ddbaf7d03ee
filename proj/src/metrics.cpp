#include "abdesign/metrics.hpp"

#include <cmath>

#include "abdesign/errors.hpp"

namespace abdesign {

double aar(const CdrState& gen, const CdrState& ref) {
    if (gen.size() != ref.size()) throw ContractError("aar: length mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gen.size(); ++i)
        if (gen.types[i] == ref.types[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(gen.size());
}

double rmsd(const CdrState& gen, const CdrState& ref) {
    if (gen.size() != ref.size()) throw ContractError("rmsd: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < gen.size(); ++i)
        sum += (gen.coords[i] - ref.coords[i]).squaredNorm();
    return std::sqrt(sum / static_cast<double>(gen.size()));
}

}  // namespace abdesign
