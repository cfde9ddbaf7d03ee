#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abdesign/so3.hpp"

namespace abdesign {

inline constexpr int kNumAminoAcids = 20;

/// Canonical one-letter alphabet, alphabetically ordered. Index order is the
/// tie-break order everywhere a deterministic argmax is taken.
inline constexpr std::array<char, kNumAminoAcids> kAminoAcidLetters = {
    'A', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'K', 'L',
    'M', 'N', 'P', 'Q', 'R', 'S', 'T', 'V', 'W', 'Y'};

enum class AminoAcid : std::uint8_t {
    Ala, Cys, Asp, Glu, Phe, Gly, His, Ile, Lys, Leu,
    Met, Asn, Pro, Gln, Arg, Ser, Thr, Val, Trp, Tyr,
};

char to_letter(AminoAcid a);
AminoAcid amino_acid_from_letter(char c);  // throws ConfigError on unknown letter
std::vector<AminoAcid> sequence_from_string(const std::string& s);
std::string to_string(const std::vector<AminoAcid>& seq);

/// The generated loop at one diffusion time: residue types, C-alpha
/// coordinates (Angstrom) and per-residue orientations. `t` is the diffusion
/// time in [0, T]; t = 0 is clean data.
struct CdrState {
    std::vector<AminoAcid> types;
    std::vector<Eigen::Vector3d> coords;
    std::vector<Rotation> orients;
    int t = 0;

    std::size_t size() const { return types.size(); }
    std::string sequence() const { return to_string(types); }

    /// Throws ContractError when array lengths disagree, the state is empty,
    /// or an orientation fails the rotation invariants.
    void validate() const;
};

enum class ChainTag : std::uint8_t { Antigen, Heavy, Light };

struct CdrSpan {
    int start = 0;
    int length = 0;
};

/// The fixed part of the antigen-antibody complex. Consumed by denoisers as
/// conditioning, never generated.
struct ComplexContext {
    std::vector<AminoAcid> types;
    std::vector<Eigen::Vector3d> coords;
    std::vector<Rotation> orients;
    std::vector<ChainTag> chain_tags;
    CdrSpan cdr_span;

    std::size_t size() const { return types.size(); }

    /// Checks internal consistency and that cdr_span.length == m.
    void validate(std::size_t m) const;
};

}  // namespace abdesign
