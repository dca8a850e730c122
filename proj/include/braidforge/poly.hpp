#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace braidforge {

// Sparse multivariate Laurent polynomial with complex double coefficients.
// Variable names are fixed at construction; exponent vectors align with them.
// Negative exponents are permitted only for the circle variables v and w.
class LaurentPoly {
  public:
    using Exp = std::vector<std::int16_t>;
    using Coeff = std::complex<double>;
    using TermMap = std::map<Exp, Coeff>;

    LaurentPoly() = default;
    explicit LaurentPoly(std::vector<std::string> vars);
    static LaurentPoly constant(std::vector<std::string> vars, Coeff c);
    static LaurentPoly monomial(std::vector<std::string> vars,
                                const std::vector<int>& exps, Coeff c);

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    int var_index(const std::string& name) const;  // -1 if absent

    void add_term(const std::vector<int>& exps, Coeff c);

    LaurentPoly operator+(const LaurentPoly& o) const;
    LaurentPoly operator-(const LaurentPoly& o) const;
    LaurentPoly operator-() const;
    LaurentPoly operator*(const LaurentPoly& o) const;
    LaurentPoly operator*(Coeff s) const;
    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator-=(const LaurentPoly& o);

    // Drop terms below rel_tol times the largest coefficient magnitude.
    void prune(double rel_tol = 1e-14);
    double max_abs_coeff() const;

    Coeff eval(const std::vector<Coeff>& values) const;  // compensated sum

    // d/d(var); exponent rule, valid for negative exponents too.
    LaurentPoly derivative(const std::string& var) const;
    // Derivative along the circle parameter when `var` stands for e^{i t}:
    // each term gains a factor (i * exponent).
    LaurentPoly circle_derivative(const std::string& var) const;

    int degree(const std::string& var) const;        // max exponent, 0 if absent
    int min_exponent(const std::string& var) const;  // min exponent, 0 if absent
    int total_degree() const;                        // max over terms of exponent sum

    // Re-embed into a superset variable list (missing vars get exponent 0).
    LaurentPoly with_vars(std::vector<std::string> new_vars) const;
    // Divide every exponent of `var` by `divisor`. Terms with non-divisible
    // exponents must be numerically negligible (< 1e-9 relative) and are
    // dropped; otherwise this throws.
    LaurentPoly rescale_exponents(const std::string& var, int divisor) const;
    // Replace var^{-n} (n > 0) by conj_var^{n}. conj_var is appended if absent.
    LaurentPoly fold_negative_powers(const std::string& var,
                                     const std::string& conj_var) const;
    // Multiply by var^{-min_exponent} so the lowest power of var becomes 0.
    // Returns the shifted polynomial and the applied power (the denominator
    // exponent d with: shifted * var^{-d} == original).
    std::pair<LaurentPoly, int> clear_var_denominator(const std::string& var) const;

    bool operator==(const LaurentPoly& o) const {
        return vars_ == o.vars_ && terms_ == o.terms_;
    }

  private:
    std::vector<std::string> vars_;
    TermMap terms_;

    void check_exponent_rules(const Exp& e) const;
    static bool allows_negative(const std::string& name);
};

struct DegreeReport {
    std::vector<std::string> vars;
    std::vector<int> var_degree;      // max exponent per variable
    std::vector<int> var_min_exponent;
    int conjugate_pair_degree = 0;    // combined v + vbar (and w + wbar) weight
    int total_degree = 0;             // max over terms of the exponent sum
};

DegreeReport degrees(const LaurentPoly& f);

// Numeric substitution of one variable; the result ranges over the remaining
// variables. A zero value is rejected when negative exponents are present.
LaurentPoly substitute(const LaurentPoly& f, const std::string& var,
                       LaurentPoly::Coeff value);

// e^{it}-harmonic substitutions ("v" is the circle variable of f).
LaurentPoly subst_unit_circle(const LaurentPoly& g);  // v^{-n} -> vbar^n
struct HolomorphicSubst {
    LaurentPoly numerator;  // no negative exponents, no common v factor
    int denominator_power = 0;
};
HolomorphicSubst subst_holomorphic(const LaurentPoly& g);

// Pullback under inverse stereographic projection S^4 -> R^3 x C:
// input vars a subset of {x, y, z, v, vbar}; output over x1..x4 with the
// denominator (|x|^2 + 1)^d cleared, d = total degree of the input.
LaurentPoly stereographic_pullback(const LaurentPoly& f);

// Pullback under inverse stereographic projection S^3 -> C^2 for polynomials
// in {u, v, vbar}; output over x1..x3 with the denominator cleared.
LaurentPoly stereographic_pullback_s3(const LaurentPoly& f);

}  // namespace braidforge
