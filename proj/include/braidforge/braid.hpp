#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace braidforge {

enum class TokenKind { sigma, rho };

struct BraidToken {
    TokenKind kind = TokenKind::sigma;
    int index = 1;  // 1-based generator index, < strand_count
    int sign = 1;   // +1 or -1

    bool operator==(const BraidToken&) const = default;
};

struct ClassicalBraidWord {
    int strands = 0;
    std::vector<BraidToken> tokens;  // all kind == sigma

    int length() const { return static_cast<int>(tokens.size()); }
    bool operator==(const ClassicalBraidWord&) const = default;
};

struct LoopBraidWord {
    int strands = 0;
    std::vector<BraidToken> tokens;  // rho tokens normalized to sign +1
    std::string original_text;       // as parsed, before normalization

    int length() const { return static_cast<int>(tokens.size()); }
    bool operator==(const LoopBraidWord& o) const {
        return strands == o.strands && tokens == o.tokens;
    }
};

enum class SingularKind { sigma_plus, sigma_minus, rho, rho_inverse };

struct SingularToken {
    SingularKind kind;
    int index;

    bool operator==(const SingularToken&) const = default;
};

struct SignedSingularWord {
    int strands = 0;
    std::vector<SingularToken> tokens;
};

struct ComponentDecomposition {
    // components[c] lists start positions in cycle order: the j-th strand of
    // component c starts at components[c][j]; successive entries follow the
    // closure permutation. Cycles begin at, and are sorted by, their smallest
    // position.
    std::vector<std::vector<int>> components;
    std::vector<int> closure_perm;  // 1-based: strand starting at p ends at closure_perm[p-1]

    int component_count() const { return static_cast<int>(components.size()); }
    int strand_count(int c) const { return static_cast<int>(components[c].size()); }
    int start_position(int c, int j) const { return components[c][j]; }  // j 0-based
    // Component index (0-based) owning start position p (1-based).
    int component_of(int p) const;
    // Strand index (0-based) within its component for start position p.
    int strand_of(int p) const;
};

// Parsing. Grammar: whitespace-separated tokens "s<i>" / "r<i>", each with an
// optional "^-1" suffix. Strand count is explicit, never inferred. The empty
// string is the identity word.
ClassicalBraidWord parse_classical_word(const std::string& text, int strands);
LoopBraidWord parse_loop_word(const std::string& text, int strands);

std::string to_text(const ClassicalBraidWord& w);
std::string to_text(const LoopBraidWord& w);

// View a classical word as a loop word (all sigma tokens).
LoopBraidWord as_loop_word(const ClassicalBraidWord& w);

// Closure permutation cycles; kinds and signs are irrelevant, every token
// contributes the transposition (i, i+1).
ComponentDecomposition strand_components(const LoopBraidWord& w);
ComponentDecomposition strand_components(const ClassicalBraidWord& w);

SignedSingularWord loop_to_signed_singular(const LoopBraidWord& w);

// One transposition (i, i+1) per token, as pairs (i, i+1).
std::vector<std::pair<int, int>> interval_permutations(const LoopBraidWord& w);

// Arrangement timeline: row k (0..length) gives, for each start position p
// (1-based index p-1), the diagram position occupied after the first k tokens.
std::vector<std::vector<int>> position_timeline(const LoopBraidWord& w);

// Deterministic random word corpus: strand counts in [2, max_strands], lengths
// in [1, max_len], uniform token kind/index, uniform sigma sign. The same
// (count, limits, seed) always yields the same words.
std::vector<LoopBraidWord> random_loop_words(int count, int max_strands,
                                             int max_len, std::uint64_t seed);

}  // namespace braidforge
