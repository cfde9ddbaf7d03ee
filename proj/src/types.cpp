#include "abdesign/types.hpp"

#include "abdesign/errors.hpp"

namespace abdesign {

char to_letter(AminoAcid a) { return kAminoAcidLetters[static_cast<std::size_t>(a)]; }

AminoAcid amino_acid_from_letter(char c) {
    for (int i = 0; i < kNumAminoAcids; ++i)
        if (kAminoAcidLetters[static_cast<std::size_t>(i)] == c)
            return static_cast<AminoAcid>(i);
    throw ConfigError(std::string("unknown amino acid letter: '") + c + "'");
}

std::vector<AminoAcid> sequence_from_string(const std::string& s) {
    std::vector<AminoAcid> out;
    out.reserve(s.size());
    for (char c : s) out.push_back(amino_acid_from_letter(c));
    return out;
}

std::string to_string(const std::vector<AminoAcid>& seq) {
    std::string out;
    out.reserve(seq.size());
    for (AminoAcid a : seq) out.push_back(to_letter(a));
    return out;
}

void CdrState::validate() const {
    if (types.empty()) throw ContractError("CdrState: empty state");
    if (coords.size() != types.size() || orients.size() != types.size())
        throw ContractError("CdrState: modality arrays disagree in length");
    for (const auto& o : orients)
        if (!so3::is_rotation(o)) throw ContractError("CdrState: invalid orientation matrix");
}

void ComplexContext::validate(std::size_t m) const {
    if (coords.size() != types.size() || orients.size() != types.size() ||
        chain_tags.size() != types.size())
        throw ContractError("ComplexContext: arrays disagree in length");
    if (cdr_span.length != static_cast<int>(m))
        throw ContractError("ComplexContext: cdr_span.length does not match state length");
}

}  // namespace abdesign
