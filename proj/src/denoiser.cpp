#include "abdesign/denoiser.hpp"

#include <cmath>

#include "abdesign/errors.hpp"

namespace abdesign {

void DenoiserOutput::validate() const {
    const auto m = static_cast<std::size_t>(seq_probs.rows());
    if (coord_means.size() != m || orient_means.size() != m)
        throw ContractError("DenoiserOutput: modality arrays disagree in length");
    if (seq_probs.cols() != kNumAminoAcids)
        throw ContractError("DenoiserOutput: seq_probs must have 20 columns");
    for (Eigen::Index i = 0; i < seq_probs.rows(); ++i) {
        double row_sum = 0.0;
        for (Eigen::Index j = 0; j < seq_probs.cols(); ++j) {
            double p = seq_probs(i, j);
            if (!(p >= 0.0) || !std::isfinite(p))
                throw ContractError("DenoiserOutput: seq_probs must be nonnegative and finite");
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-9)
            throw ContractError("DenoiserOutput: seq_probs rows must sum to 1");
    }
    for (const auto& x : coord_means)
        if (!x.allFinite()) throw ContractError("DenoiserOutput: non-finite coordinate mean");
    for (const auto& o : orient_means)
        if (!so3::is_rotation(o)) throw ContractError("DenoiserOutput: invalid mean rotation");
}

}  // namespace abdesign
