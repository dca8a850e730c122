#include "braidforge/braid.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "braidforge/util.hpp"

namespace braidforge {

namespace {

BraidToken parse_token(const std::string& tok, int strands) {
    if (tok.size() < 2 || (tok[0] != 's' && tok[0] != 'r'))
        throw std::invalid_argument("malformed braid token: " + tok);
    BraidToken t;
    t.kind = (tok[0] == 's') ? TokenKind::sigma : TokenKind::rho;

    size_t pos = 1;
    while (pos < tok.size() && tok[pos] >= '0' && tok[pos] <= '9') ++pos;
    if (pos == 1) throw std::invalid_argument("malformed braid token: " + tok);
    try {
        t.index = std::stoi(tok.substr(1, pos - 1));
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("malformed braid token: " + tok);
    }

    if (pos < tok.size()) {
        if (tok.substr(pos) != "^-1")
            throw std::invalid_argument("malformed braid token: " + tok);
        t.sign = -1;
    }
    if (t.index < 1 || t.index >= strands)
        throw std::invalid_argument("generator index out of range: " + tok);
    return t;
}

std::vector<BraidToken> parse_tokens(const std::string& text, int strands) {
    if (strands < 1) throw std::invalid_argument("strand count must be positive");
    std::vector<BraidToken> tokens;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) tokens.push_back(parse_token(tok, strands));
    return tokens;
}

std::string token_text(const BraidToken& t) {
    std::string s = (t.kind == TokenKind::sigma) ? "s" : "r";
    s += std::to_string(t.index);
    if (t.sign < 0) s += "^-1";
    return s;
}

ComponentDecomposition decompose(int strands, const std::vector<BraidToken>& tokens) {
    std::vector<int> perm(strands);
    for (int p = 1; p <= strands; ++p) {
        int pos = p;
        for (const auto& t : tokens) {
            if (pos == t.index)
                pos = t.index + 1;
            else if (pos == t.index + 1)
                pos = t.index;
        }
        perm[p - 1] = pos;
    }

    ComponentDecomposition d;
    d.closure_perm = perm;
    std::vector<bool> seen(strands + 1, false);
    for (int p = 1; p <= strands; ++p) {
        if (seen[p]) continue;
        std::vector<int> cycle;
        int q = p;
        do {
            seen[q] = true;
            cycle.push_back(q);
            q = perm[q - 1];
        } while (q != p);
        d.components.push_back(std::move(cycle));
    }
    return d;
}

}  // namespace

int ComponentDecomposition::component_of(int p) const {
    for (int c = 0; c < component_count(); ++c)
        for (int q : components[c])
            if (q == p) return c;
    throw std::out_of_range("position not in any component");
}

int ComponentDecomposition::strand_of(int p) const {
    for (const auto& comp : components)
        for (int j = 0; j < static_cast<int>(comp.size()); ++j)
            if (comp[j] == p) return j;
    throw std::out_of_range("position not in any component");
}

ClassicalBraidWord parse_classical_word(const std::string& text, int strands) {
    ClassicalBraidWord w;
    w.strands = strands;
    w.tokens = parse_tokens(text, strands);
    for (const auto& t : w.tokens)
        if (t.kind != TokenKind::sigma)
            throw std::invalid_argument("classical word may not contain r tokens");
    return w;
}

LoopBraidWord parse_loop_word(const std::string& text, int strands) {
    LoopBraidWord w;
    w.strands = strands;
    w.original_text = text;
    w.tokens = parse_tokens(text, strands);
    for (auto& t : w.tokens)
        if (t.kind == TokenKind::rho) t.sign = 1;  // rho is an involution
    return w;
}

std::string to_text(const ClassicalBraidWord& w) {
    std::string out;
    for (const auto& t : w.tokens) {
        if (!out.empty()) out += ' ';
        out += token_text(t);
    }
    return out;
}

std::string to_text(const LoopBraidWord& w) {
    std::string out;
    for (const auto& t : w.tokens) {
        if (!out.empty()) out += ' ';
        out += token_text(t);
    }
    return out;
}

LoopBraidWord as_loop_word(const ClassicalBraidWord& w) {
    LoopBraidWord lw;
    lw.strands = w.strands;
    lw.tokens = w.tokens;
    lw.original_text = to_text(w);
    return lw;
}

ComponentDecomposition strand_components(const LoopBraidWord& w) {
    return decompose(w.strands, w.tokens);
}

ComponentDecomposition strand_components(const ClassicalBraidWord& w) {
    return decompose(w.strands, w.tokens);
}

SignedSingularWord loop_to_signed_singular(const LoopBraidWord& w) {
    SignedSingularWord out;
    out.strands = w.strands;
    out.tokens.reserve(w.tokens.size());
    for (const auto& t : w.tokens) {
        SingularToken st;
        st.index = t.index;
        if (t.kind == TokenKind::sigma)
            st.kind = (t.sign > 0) ? SingularKind::sigma_plus : SingularKind::sigma_minus;
        else
            st.kind = SingularKind::rho;
        out.tokens.push_back(st);
    }
    return out;
}

std::vector<std::pair<int, int>> interval_permutations(const LoopBraidWord& w) {
    std::vector<std::pair<int, int>> out;
    out.reserve(w.tokens.size());
    for (const auto& t : w.tokens) out.emplace_back(t.index, t.index + 1);
    return out;
}

std::vector<LoopBraidWord> random_loop_words(int count, int max_strands,
                                             int max_len, std::uint64_t seed) {
    auto rng = seeded_rng(seed, 0xB41Dull);
    std::uniform_int_distribution<int> strand_dist(2, max_strands);
    std::uniform_int_distribution<int> len_dist(1, max_len);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<LoopBraidWord> out;
    out.reserve(count);
    for (int n = 0; n < count; ++n) {
        LoopBraidWord w;
        w.strands = strand_dist(rng);
        const int len = len_dist(rng);
        std::uniform_int_distribution<int> idx_dist(1, w.strands - 1);
        std::ostringstream text;
        for (int k = 0; k < len; ++k) {
            BraidToken t;
            t.kind = coin(rng) ? TokenKind::rho : TokenKind::sigma;
            t.index = idx_dist(rng);
            t.sign = (t.kind == TokenKind::rho || coin(rng)) ? 1 : -1;
            w.tokens.push_back(t);
            if (k) text << ' ';
            text << (t.kind == TokenKind::sigma ? 's' : 'r') << t.index;
            if (t.sign < 0) text << "^-1";
        }
        w.original_text = text.str();
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<std::vector<int>> position_timeline(const LoopBraidWord& w) {
    std::vector<std::vector<int>> rows;
    rows.reserve(w.tokens.size() + 1);
    std::vector<int> pos(w.strands);
    for (int p = 0; p < w.strands; ++p) pos[p] = p + 1;
    rows.push_back(pos);
    for (const auto& t : w.tokens) {
        for (int p = 0; p < w.strands; ++p) {
            if (pos[p] == t.index)
                pos[p] = t.index + 1;
            else if (pos[p] == t.index + 1)
                pos[p] = t.index;
        }
        rows.push_back(pos);
    }
    return rows;
}

}  // namespace braidforge
