#include "braidforge/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "braidforge/util.hpp"

namespace braidforge {

namespace {

constexpr int kExpLimit = 32767;

const std::vector<std::string> kAllowedNames = {
    "x", "y", "z", "r", "u", "v", "vbar", "w", "wbar",
    "x1", "x2", "x3", "x4"};

void check_var_names(const std::vector<std::string>& vars) {
    for (const auto& name : vars) {
        if (std::find(kAllowedNames.begin(), kAllowedNames.end(), name) ==
            kAllowedNames.end())
            throw std::invalid_argument("unknown variable name: " + name);
    }
    for (size_t i = 0; i < vars.size(); ++i)
        for (size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j])
                throw std::invalid_argument("duplicate variable name: " + vars[i]);
}

}  // namespace

bool LaurentPoly::allows_negative(const std::string& name) {
    return name == "v" || name == "w";
}

LaurentPoly::LaurentPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {
    check_var_names(vars_);
}

LaurentPoly LaurentPoly::constant(std::vector<std::string> vars, Coeff c) {
    LaurentPoly p(std::move(vars));
    if (c != Coeff(0.0)) p.terms_[Exp(p.vars_.size(), 0)] = c;
    return p;
}

LaurentPoly LaurentPoly::monomial(std::vector<std::string> vars,
                                  const std::vector<int>& exps, Coeff c) {
    LaurentPoly p(std::move(vars));
    p.add_term(exps, c);
    return p;
}

int LaurentPoly::var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

void LaurentPoly::check_exponent_rules(const Exp& e) const {
    for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 0 && !allows_negative(vars_[i]))
            throw std::invalid_argument("negative exponent on variable " + vars_[i]);
    }
}

void LaurentPoly::add_term(const std::vector<int>& exps, Coeff c) {
    if (exps.size() != vars_.size())
        throw std::invalid_argument("exponent vector length mismatch");
    Exp e(exps.size());
    for (size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] > kExpLimit || exps[i] < -kExpLimit)
            throw std::overflow_error("exponent magnitude exceeds 2^15");
        e[i] = static_cast<std::int16_t>(exps[i]);
    }
    check_exponent_rules(e);
    if (c == Coeff(0.0)) return;
    auto& slot = terms_[e];
    slot += c;
    if (slot == Coeff(0.0)) terms_.erase(e);
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
    LaurentPoly r = *this;
    r += o;
    return r;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
    if (vars_ != o.vars_) throw std::invalid_argument("variable sets differ");
    for (const auto& [e, c] : o.terms_) {
        auto& slot = terms_[e];
        slot += c;
        if (slot == Coeff(0.0)) terms_.erase(e);
    }
    return *this;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
    LaurentPoly r = *this;
    r -= o;
    return r;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) {
    if (vars_ != o.vars_) throw std::invalid_argument("variable sets differ");
    for (const auto& [e, c] : o.terms_) {
        auto& slot = terms_[e];
        slot -= c;
        if (slot == Coeff(0.0)) terms_.erase(e);
    }
    return *this;
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly r(vars_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
}

LaurentPoly LaurentPoly::operator*(Coeff s) const {
    LaurentPoly r(vars_);
    if (s == Coeff(0.0)) return r;
    for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
    return r;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
    if (vars_ != o.vars_) throw std::invalid_argument("variable sets differ");
    LaurentPoly r(vars_);
    const size_t nv = vars_.size();
    Exp sum(nv);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (size_t i = 0; i < nv; ++i) {
                const int s = static_cast<int>(ea[i]) + static_cast<int>(eb[i]);
                if (s > kExpLimit || s < -kExpLimit)
                    throw std::overflow_error("exponent magnitude exceeds 2^15");
                sum[i] = static_cast<std::int16_t>(s);
            }
            auto& slot = r.terms_[sum];
            slot += ca * cb;
            if (slot == Coeff(0.0)) r.terms_.erase(sum);
        }
    }
    return r;
}

double LaurentPoly::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

void LaurentPoly::prune(double rel_tol) {
    const double cut = rel_tol * max_abs_coeff();
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= cut)
            it = terms_.erase(it);
        else
            ++it;
    }
}

LaurentPoly::Coeff LaurentPoly::eval(const std::vector<Coeff>& values) const {
    if (values.size() != vars_.size())
        throw std::invalid_argument("value vector length mismatch");
    const size_t nv = vars_.size();

    // Per-variable power tables covering the exponent range actually used.
    std::vector<int> mn(nv, 0), mx(nv, 0);
    for (const auto& [e, c] : terms_) {
        for (size_t i = 0; i < nv; ++i) {
            mn[i] = std::min(mn[i], static_cast<int>(e[i]));
            mx[i] = std::max(mx[i], static_cast<int>(e[i]));
        }
    }
    std::vector<std::vector<Coeff>> pow(nv);
    for (size_t i = 0; i < nv; ++i) {
        pow[i].resize(mx[i] - mn[i] + 1);
        const int zero_at = -mn[i];
        pow[i][zero_at] = 1.0;
        for (int k = 1; k <= mx[i]; ++k)
            pow[i][zero_at + k] = pow[i][zero_at + k - 1] * values[i];
        const Coeff inv = (mn[i] < 0) ? Coeff(1.0) / values[i] : Coeff(0.0);
        for (int k = -1; k >= mn[i]; --k)
            pow[i][zero_at + k] = pow[i][zero_at + k + 1] * inv;
    }

    NeumaierComplexSum acc;
    for (const auto& [e, c] : terms_) {
        Coeff term = c;
        for (size_t i = 0; i < nv; ++i) {
            const int k = e[i];
            if (k != 0) term *= pow[i][k - mn[i]];
        }
        acc.add(term);
    }
    return acc.value();
}

LaurentPoly LaurentPoly::derivative(const std::string& var) const {
    const int vi = var_index(var);
    if (vi < 0) return LaurentPoly(vars_);
    LaurentPoly r(vars_);
    for (const auto& [e, c] : terms_) {
        const int n = e[vi];
        if (n == 0) continue;
        Exp d = e;
        d[vi] = static_cast<std::int16_t>(n - 1);
        auto& slot = r.terms_[d];
        slot += c * static_cast<double>(n);
        if (slot == Coeff(0.0)) r.terms_.erase(d);
    }
    return r;
}

LaurentPoly LaurentPoly::circle_derivative(const std::string& var) const {
    const int vi = var_index(var);
    if (vi < 0) return LaurentPoly(vars_);
    LaurentPoly r(vars_);
    for (const auto& [e, c] : terms_) {
        const int n = e[vi];
        if (n == 0) continue;
        r.terms_[e] = c * Coeff(0.0, static_cast<double>(n));
    }
    return r;
}

int LaurentPoly::degree(const std::string& var) const {
    const int vi = var_index(var);
    if (vi < 0) return 0;
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[vi]));
    return d;
}

int LaurentPoly::min_exponent(const std::string& var) const {
    const int vi = var_index(var);
    if (vi < 0) return 0;
    int d = 0;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        const int k = e[vi];
        d = first ? k : std::min(d, k);
        first = false;
    }
    return d;
}

int LaurentPoly::total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (auto k : e) s += k;
        d = std::max(d, s);
    }
    return d;
}

LaurentPoly LaurentPoly::with_vars(std::vector<std::string> new_vars) const {
    LaurentPoly r(std::move(new_vars));
    std::vector<int> where(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        const int idx = r.var_index(vars_[i]);
        if (idx < 0)
            throw std::invalid_argument("with_vars: target lacks variable " + vars_[i]);
        where[i] = idx;
    }
    for (const auto& [e, c] : terms_) {
        Exp ne(r.vars_.size(), 0);
        for (size_t i = 0; i < vars_.size(); ++i) ne[where[i]] = e[i];
        r.terms_[ne] = c;
    }
    return r;
}

LaurentPoly LaurentPoly::rescale_exponents(const std::string& var, int divisor) const {
    if (divisor < 1) throw std::invalid_argument("divisor must be positive");
    const int vi = var_index(var);
    if (vi < 0 || divisor == 1) return *this;
    const double cut = 1e-9 * max_abs_coeff();
    LaurentPoly r(vars_);
    for (const auto& [e, c] : terms_) {
        const int n = e[vi];
        if (n % divisor != 0) {
            if (std::abs(c) < cut) continue;  // numerically spurious harmonic
            throw std::runtime_error(
                "harmonic not divisible by strand count during rescale");
        }
        Exp ne = e;
        ne[vi] = static_cast<std::int16_t>(n / divisor);
        auto& slot = r.terms_[ne];
        slot += c;
        if (slot == Coeff(0.0)) r.terms_.erase(ne);
    }
    return r;
}

LaurentPoly LaurentPoly::fold_negative_powers(const std::string& var,
                                              const std::string& conj_var) const {
    const int vi = var_index(var);
    if (vi < 0) return *this;
    std::vector<std::string> nv = vars_;
    if (var_index(conj_var) < 0) nv.push_back(conj_var);
    LaurentPoly r(nv);
    const int ci = r.var_index(conj_var);
    for (const auto& [e, c] : terms_) {
        Exp ne(nv.size(), 0);
        for (size_t i = 0; i < vars_.size(); ++i) ne[r.var_index(vars_[i])] = e[i];
        if (e[vi] < 0) {
            ne[r.var_index(var)] = 0;
            ne[ci] = static_cast<std::int16_t>(ne[ci] - e[vi]);
        }
        auto& slot = r.terms_[ne];
        slot += c;
        if (slot == Coeff(0.0)) r.terms_.erase(ne);
    }
    return r;
}

std::pair<LaurentPoly, int> LaurentPoly::clear_var_denominator(
    const std::string& var) const {
    const int vi = var_index(var);
    if (vi < 0 || terms_.empty()) return {*this, 0};
    const int shift = -min_exponent(var);
    if (shift == 0) return {*this, 0};
    LaurentPoly r(vars_);
    for (const auto& [e, c] : terms_) {
        Exp ne = e;
        ne[vi] = static_cast<std::int16_t>(ne[vi] + shift);
        r.terms_[ne] = c;
    }
    return {r, shift};
}

DegreeReport degrees(const LaurentPoly& f) {
    DegreeReport rep;
    rep.vars = f.vars();
    for (const auto& v : f.vars()) {
        rep.var_degree.push_back(f.degree(v));
        rep.var_min_exponent.push_back(f.min_exponent(v));
    }
    auto pair_deg = [&](const std::string& a, const std::string& b) {
        int d = 0;
        const int ia = f.var_index(a), ib = f.var_index(b);
        if (ia < 0 && ib < 0) return 0;
        for (const auto& [e, c] : f.terms()) {
            int s = 0;
            if (ia >= 0) s += std::abs(static_cast<int>(e[ia]));
            if (ib >= 0) s += std::abs(static_cast<int>(e[ib]));
            d = std::max(d, s);
        }
        return d;
    };
    rep.conjugate_pair_degree = std::max(pair_deg("v", "vbar"), pair_deg("w", "wbar"));
    rep.total_degree = f.total_degree();
    return rep;
}

LaurentPoly substitute(const LaurentPoly& f, const std::string& var,
                       LaurentPoly::Coeff value) {
    const int slot = f.var_index(var);
    if (slot < 0) throw std::invalid_argument("substitute: unknown variable " + var);
    if (f.min_exponent(var) < 0 && value == LaurentPoly::Coeff(0.0))
        throw std::invalid_argument("substitute: zero value with negative exponents");

    std::vector<std::string> rest;
    for (const auto& name : f.vars())
        if (name != var) rest.push_back(name);

    // The table spans [lo, hi] around exponent zero even when every term
    // carries the variable with the same sign.
    const int mn = f.min_exponent(var), mx = f.degree(var);
    const int lo = std::min(mn, 0), hi = std::max(mx, 0);
    std::vector<LaurentPoly::Coeff> pow(hi - lo + 1);
    pow[-lo] = 1.0;
    for (int k = 1; k <= hi; ++k) pow[-lo + k] = pow[-lo + k - 1] * value;
    if (lo < 0) {
        const LaurentPoly::Coeff inv = LaurentPoly::Coeff(1.0) / value;
        for (int k = -1; k >= lo; --k) pow[-lo + k] = pow[-lo + k + 1] * inv;
    }

    LaurentPoly out(rest);
    std::vector<int> exps(rest.size());
    for (const auto& [e, c] : f.terms()) {
        size_t r = 0;
        for (size_t i = 0; i < f.vars().size(); ++i)
            if (static_cast<int>(i) != slot) exps[r++] = e[i];
        out.add_term(exps, c * pow[e[slot] - lo]);
    }
    return out;
}

LaurentPoly subst_unit_circle(const LaurentPoly& g) {
    LaurentPoly folded = g.fold_negative_powers("v", "vbar");
    return folded.fold_negative_powers("w", "wbar");
}

HolomorphicSubst subst_holomorphic(const LaurentPoly& g) {
    HolomorphicSubst out;
    auto [shifted, power] = g.clear_var_denominator("v");
    out.numerator = std::move(shifted);
    out.denominator_power = power;
    return out;
}

namespace {

// Shared pullback core: each input variable maps to (numerator polynomial) /
// denom, with one fixed denominator polynomial for all of them. Clears
// denom^d, d = total degree of the input.
LaurentPoly pullback_with(const LaurentPoly& f,
                          const std::vector<std::string>& out_vars,
                          const std::vector<LaurentPoly>& numerators,
                          const LaurentPoly& denom) {
    for (const auto& [e, c] : f.terms())
        for (auto k : e)
            if (k < 0)
                throw std::invalid_argument(
                    "pullback input must have non-negative exponents");

    const int d = f.total_degree();

    // Power tables, built on demand.
    std::vector<std::vector<LaurentPoly>> npow(numerators.size());
    for (size_t i = 0; i < numerators.size(); ++i)
        npow[i].push_back(LaurentPoly::constant(out_vars, 1.0));
    std::vector<LaurentPoly> dpow{LaurentPoly::constant(out_vars, 1.0)};
    auto num_power = [&](size_t i, int k) -> const LaurentPoly& {
        while (static_cast<int>(npow[i].size()) <= k)
            npow[i].push_back(npow[i].back() * numerators[i]);
        return npow[i][k];
    };
    auto den_power = [&](int k) -> const LaurentPoly& {
        while (static_cast<int>(dpow.size()) <= k)
            dpow.push_back(dpow.back() * denom);
        return dpow[k];
    };

    LaurentPoly out(out_vars);
    for (const auto& [e, c] : f.terms()) {
        LaurentPoly term = LaurentPoly::constant(out_vars, c);
        int used = 0;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            term = term * num_power(i, e[i]);
            used += e[i];
        }
        if (d > used) term = term * den_power(d - used);
        out += term;
    }
    out.prune();
    return out;
}

}  // namespace

LaurentPoly stereographic_pullback(const LaurentPoly& f) {
    const std::vector<std::string> out_vars = {"x1", "x2", "x3", "x4"};
    // Denominator x1^2 + x2^2 + x3^2 + x4^2 + 1.
    LaurentPoly denom(out_vars);
    denom.add_term({2, 0, 0, 0}, 1.0);
    denom.add_term({0, 2, 0, 0}, 1.0);
    denom.add_term({0, 0, 2, 0}, 1.0);
    denom.add_term({0, 0, 0, 2}, 1.0);
    denom.add_term({0, 0, 0, 0}, 1.0);

    std::vector<LaurentPoly> nums;
    for (const auto& name : f.vars()) {
        LaurentPoly p(out_vars);
        if (name == "x") {
            p.add_term({1, 0, 0, 0}, 2.0);
        } else if (name == "y") {
            p.add_term({0, 1, 0, 0}, 2.0);
        } else if (name == "z") {
            p = denom;
            p.add_term({0, 0, 0, 0}, -2.0);
        } else if (name == "v") {
            p.add_term({0, 0, 1, 0}, 2.0);
            p.add_term({0, 0, 0, 1}, {0.0, 2.0});
        } else if (name == "vbar") {
            p.add_term({0, 0, 1, 0}, 2.0);
            p.add_term({0, 0, 0, 1}, {0.0, -2.0});
        } else {
            throw std::invalid_argument("pullback input variable " + name +
                                        " not in {x,y,z,v,vbar}");
        }
        nums.push_back(std::move(p));
    }
    return pullback_with(f, out_vars, nums, denom);
}

LaurentPoly stereographic_pullback_s3(const LaurentPoly& f) {
    const std::vector<std::string> out_vars = {"x1", "x2", "x3"};
    // Denominator x1^2 + x2^2 + x3^2 + 1.
    LaurentPoly denom(out_vars);
    denom.add_term({2, 0, 0}, 1.0);
    denom.add_term({0, 2, 0}, 1.0);
    denom.add_term({0, 0, 2}, 1.0);
    denom.add_term({0, 0, 0}, 1.0);

    std::vector<LaurentPoly> nums;
    for (const auto& name : f.vars()) {
        LaurentPoly p(out_vars);
        if (name == "u") {
            // (x1^2 + x2^2 + x3^2 - 1 + 2 i x3) / denom
            p = denom;
            p.add_term({0, 0, 0}, -2.0);
            p.add_term({0, 0, 1}, {0.0, 2.0});
        } else if (name == "v") {
            p.add_term({1, 0, 0}, 2.0);
            p.add_term({0, 1, 0}, {0.0, 2.0});
        } else if (name == "vbar") {
            p.add_term({1, 0, 0}, 2.0);
            p.add_term({0, 1, 0}, {0.0, -2.0});
        } else {
            throw std::invalid_argument("pullback input variable " + name +
                                        " not in {u,v,vbar}");
        }
        nums.push_back(std::move(p));
    }
    return pullback_with(f, out_vars, nums, denom);
}

}  // namespace braidforge
