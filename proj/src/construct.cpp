#include "braidforge/construct.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

#include "braidforge/verify.hpp"

namespace braidforge {

namespace {

using Coeff = LaurentPoly::Coeff;

// Exact floor division for b > 0; C++ integer division truncates toward zero.
long long floor_div(long long a, long long b) {
    long long q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

// Shared summand of every degree estimate: the node count of a component's
// y-curve interpolation, driven by its strand count, the word length and the
// crossings against the remaining strands.
long long bound_term(long long s_C, long long l, long long s) {
    return floor_div((s_C + 1) * (s_C * l - 1) + l * s_C * (s - s_C) - 1, 2);
}

long long bound_term_clamped(long long s_C, long long l, long long s) {
    return std::max(bound_term(s_C, l, s), s_C);
}

// Exchange-crossing incidences per component, counted with multiplicity: a
// letter whose two strands belong to the same component contributes twice.
std::vector<int> sigma_incidence_counts(const LoopBraidWord& word,
                                        const ComponentDecomposition& decomp) {
    std::vector<int> n(decomp.component_count(), 0);
    const auto timeline = position_timeline(word);
    for (std::size_t k = 0; k < word.tokens.size(); ++k) {
        if (word.tokens[k].kind != TokenKind::sigma) continue;
        const int i = word.tokens[k].index;
        for (int p = 1; p <= word.strands; ++p) {
            const int pos = timeline[k][p - 1];
            if (pos == i || pos == i + 1) n[decomp.component_of(p)] += 1;
        }
    }
    return n;
}

std::vector<Coeff> unity_roots(int s) {
    std::vector<Coeff> w(s);
    for (int m = 0; m < s; ++m)
        w[m] = std::polar(1.0, kTau * static_cast<double>(m) / s);
    return w;
}

int mod_index(long long k, int s) {
    long long m = k % s;
    if (m < 0) m += s;
    return static_cast<int>(m);
}

// Laurent form of a trig polynomial evaluated along strand j of an s-strand
// component: harmonics of (t + 2*pi*j)/s turn into powers of the component's
// circle variable E = e^{i t / s}, each twisted by a root of unity.
LaurentPoly strand_trig(const std::vector<Coeff>& spectrum, int j, int s,
                        const std::vector<std::string>& vars, int v_slot,
                        const std::vector<Coeff>& roots) {
    const int d = (static_cast<int>(spectrum.size()) - 1) / 2;
    LaurentPoly out(vars);
    std::vector<int> exps(vars.size(), 0);
    for (int k = -d; k <= d; ++k) {
        const Coeff c = spectrum[k + d];
        if (c == Coeff(0.0)) continue;
        exps[v_slot] = k;
        out.add_term(exps, c * roots[mod_index(static_cast<long long>(j) * k, s)]);
    }
    return out;
}

std::vector<Coeff> real_spectrum(const TrigPoly& p) { return p.spectrum(); }

LaurentPoly axis_monomial(const std::vector<std::string>& vars, int slot,
                          Coeff c) {
    std::vector<int> exps(vars.size(), 0);
    exps[slot] = 1;
    return LaurentPoly::monomial(vars, exps, c);
}

// One closure component of the ring product: the quadratic tube factors of
// all its strands multiplied together, with the circle exponents rescaled
// from the component parameter back to t.
LaurentPoly ring_component(const StrandSystem& sys, int c, double lambda,
                           const std::vector<std::string>& vars,
                           double prune_tol) {
    const int s_C = sys.strands_of(c);
    const auto roots = unity_roots(s_C);
    const auto specF = real_spectrum(sys.comps[c].F);
    const auto specG = real_spectrum(sys.comps[c].G);
    const auto specH = real_spectrum(sys.comps[c].H);
    const auto specR = real_spectrum(sys.comps[c].R * sys.epsilon);
    const Coeff inv(1.0 / lambda);
    const int v_slot = static_cast<int>(vars.size()) - 1;

    LaurentPoly prod = LaurentPoly::constant(vars, 1.0);
    for (int j = 0; j < s_C; ++j) {
        const LaurentPoly A =
            axis_monomial(vars, 0, inv) - strand_trig(specF, j, s_C, vars, v_slot, roots);
        const LaurentPoly B =
            axis_monomial(vars, 1, inv) - strand_trig(specG, j, s_C, vars, v_slot, roots);
        const LaurentPoly Z =
            axis_monomial(vars, 2, inv) - strand_trig(specH, j, s_C, vars, v_slot, roots);
        const LaurentPoly Rr = strand_trig(specR, j, s_C, vars, v_slot, roots);
        LaurentPoly factor = A * A + B * B - Rr * Rr + Z * Coeff(0.0, 1.0);
        prod = prod * factor;
        prod.prune(prune_tol);
    }
    return prod.rescale_exponents("v", s_C);
}

// One closure component of the u-monic product: linear factors u - scale *
// (X + iY) per strand.
LaurentPoly monic_component(const StrandSystem& sys, int c, Coeff strand_scale,
                            int twist, const std::vector<std::string>& vars,
                            double prune_tol) {
    const int s_C = sys.strands_of(c);
    const auto roots = unity_roots(s_C);
    const auto specF = real_spectrum(sys.comps[c].F);
    const auto specG = real_spectrum(sys.comps[c].G);
    const int d = std::max((static_cast<int>(specF.size()) - 1) / 2,
                           (static_cast<int>(specG.size()) - 1) / 2);
    std::vector<Coeff> spec(2 * d + 1, Coeff(0.0));
    const int dF = (static_cast<int>(specF.size()) - 1) / 2;
    const int dG = (static_cast<int>(specG.size()) - 1) / 2;
    for (int k = -dF; k <= dF; ++k) spec[k + d] += specF[k + dF];
    for (int k = -dG; k <= dG; ++k) spec[k + d] += Coeff(0.0, 1.0) * specG[k + dG];

    LaurentPoly prod = LaurentPoly::constant(vars, 1.0);
    std::vector<int> twist_exps(vars.size(), 0);
    if (twist != 0) twist_exps[2] = twist;  // vars are {u, v, w}
    for (int j = 0; j < s_C; ++j) {
        LaurentPoly strand = strand_trig(spec, j, s_C, vars, 1, roots) * strand_scale;
        if (twist != 0)
            strand = strand * LaurentPoly::monomial(vars, twist_exps, 1.0);
        LaurentPoly factor = axis_monomial(vars, 0, 1.0) - strand;
        prod = prod * factor;
        prod.prune(prune_tol);
    }
    return prod.rescale_exponents("v", s_C);
}

std::vector<LaurentPoly> power_table(const LaurentPoly& base, int top,
                                     const std::vector<std::string>& vars,
                                     double prune_tol) {
    std::vector<LaurentPoly> pow;
    pow.reserve(top + 1);
    pow.push_back(LaurentPoly::constant(vars, 1.0));
    for (int k = 1; k <= top; ++k) {
        pow.push_back(pow.back() * base);
        pow.back().prune(prune_tol);
    }
    return pow;
}

// One closure component of the satellite product: per strand, the filling
// polynomial composed with the tube coordinates, times the radius raised to
// the filling degree.
LaurentPoly satellite_component(const StrandSystem& sys, int c,
                                const SatelliteFactor& sf, double lambda,
                                const std::vector<std::string>& vars,
                                double prune_tol) {
    const int s_C = sys.strands_of(c);
    const auto roots = unity_roots(s_C);
    const auto specF = real_spectrum(sys.comps[c].F);
    const auto specG = real_spectrum(sys.comps[c].G);
    const auto specH = real_spectrum(sys.comps[c].H);
    const auto specR = real_spectrum(sys.comps[c].R * sys.epsilon);
    const Coeff inv(1.0 / lambda);
    const int v_slot = static_cast<int>(vars.size()) - 1;

    LaurentPoly prod = LaurentPoly::constant(vars, 1.0);
    for (int j = 0; j < s_C; ++j) {
        const LaurentPoly Ax =
            axis_monomial(vars, 0, inv) - strand_trig(specF, j, s_C, vars, v_slot, roots);
        const LaurentPoly Ay =
            axis_monomial(vars, 1, inv) - strand_trig(specG, j, s_C, vars, v_slot, roots);
        const LaurentPoly Az =
            axis_monomial(vars, 2, inv) - strand_trig(specH, j, s_C, vars, v_slot, roots);
        const LaurentPoly Rr = strand_trig(specR, j, s_C, vars, v_slot, roots);

        const auto px = power_table(Ax, sf.degree, vars, prune_tol);
        const auto py = power_table(Ay, sf.degree, vars, prune_tol);
        const auto pz = power_table(Az, sf.degree, vars, prune_tol);
        const auto pr = power_table(Rr, sf.degree, vars, prune_tol);

        LaurentPoly factor(vars);
        for (const auto& [e, coeff] : sf.f3.terms()) {
            const int a = e[0], b = e[1], cz = e[2];
            LaurentPoly term = pr[sf.degree - a - b] * px[a];
            term = term * py[b];
            term = term * pz[cz];
            factor += term * coeff;
        }
        factor.prune(prune_tol);
        prod = prod * factor;
        prod.prune(prune_tol);
    }
    return prod.rescale_exponents("v", s_C);
}

// Roots in u of the filling polynomial's slice at v = vv with the conjugate
// pairing of the sphere (vbar = conj v).
std::vector<Coeff> fibre_slice_roots(const LaurentPoly& fin, const Coeff& vv) {
    LaurentPoly slice = substitute(fin, "v", vv);
    slice = substitute(slice, "vbar", std::conj(vv));
    std::vector<Coeff> ucoeffs(slice.degree("u") + 1, Coeff(0.0));
    for (const auto& [e, coeff] : slice.terms()) ucoeffs[e[0]] += coeff;
    return poly_roots(ucoeffs);
}

// Largest slice-root magnitude over a polar grid of the tube fibre. The
// filling must fit inside the unit ball at every radius, not just on the
// boundary circle where the strand curves live; roots scale linearly with the
// filling scale, so one probe at scale 1 fixes the admissible value exactly.
double max_fibre_root(const LaurentPoly& fin) {
    constexpr int angles = 64;
    constexpr int radii = 32;
    double m = 0.0;
    for (int ia = 0; ia < angles; ++ia) {
        const double tt = kTau * ia / angles;
        for (int ir = 0; ir <= radii; ++ir) {
            const Coeff vv = std::polar(static_cast<double>(ir) / radii, tt);
            for (const Coeff& u : fibre_slice_roots(fin, vv))
                m = std::max(m, std::abs(u));
        }
    }
    return m;
}

SatelliteFactor make_filling(const ClassicalBraidWord& fill,
                             const ConstructOptions& opts) {
    SatelliteFactor sf;
    sf.word = fill;
    if (fill.strands == 1) {
        if (!fill.tokens.empty())
            throw std::invalid_argument(
                "satellite-construction: 1-strand filling cannot carry letters");
        // Unit-circle tube core: the pullback of the first complex coordinate,
        // vanishing exactly on the circle x1^2 + x2^2 = 1, x3 = 0.
        LaurentPoly f3({"x1", "x2", "x3"});
        f3.add_term({2, 0, 0}, 1.0);
        f3.add_term({0, 2, 0}, 1.0);
        f3.add_term({0, 0, 2}, 1.0);
        f3.add_term({0, 0, 0}, -1.0);
        f3.add_term({0, 0, 1}, Coeff(0.0, 2.0));
        sf.f3 = std::move(f3);
        sf.degree = 2;
        return sf;
    }
    ConstructOptions inner_opts;
    inner_opts.lambda = 1.0;
    inner_opts.prune_rel_tol = opts.prune_rel_tol;
    inner_opts.strand = opts.strand;
    const ConstructionResult probe = algorithm0(fill, inner_opts);
    // Shrink the filling until its zero set stays strictly inside the unit
    // ball of the chart, so every fibre meets the sphere.
    const double reach = max_fibre_root(probe.f);
    const double lam = reach > 1e-12
                           ? std::min(opts.satellite_lambda, 0.8 / reach)
                           : opts.satellite_lambda;
    inner_opts.lambda = lam;
    ConstructionResult inner = algorithm0(fill, inner_opts);
    sf.inner_f = inner.f;
    sf.inner_lambda = lam;
    sf.f3 = stereographic_pullback_s3(inner.f);
    sf.degree = sf.f3.total_degree();
    return sf;
}

double resolve_lambda(const std::optional<double>& lambda) {
    if (lambda && *lambda <= 0.0)
        throw std::invalid_argument("construction: scale must be positive");
    return lambda.value_or(1.0);
}

}  // namespace

BoundReport classical_degree_bound(const ClassicalBraidWord& word) {
    const auto decomp = strand_components(word);
    BoundReport rep;
    rep.flavor = "classical";
    rep.total_strands = word.strands;
    rep.word_length = word.length();
    rep.sigma_incidence = sigma_incidence_counts(as_loop_word(word), decomp);
    long long total = 0;
    for (int c = 0; c < decomp.component_count(); ++c) {
        rep.component_strands.push_back(decomp.strand_count(c));
        const long long term =
            bound_term_clamped(decomp.strand_count(c), word.length(), word.strands);
        rep.contributions.push_back(term);
        total += term;
    }
    rep.bound = total;
    return rep;
}

BoundReport loop_degree_bound(const LoopBraidWord& word) {
    const auto decomp = strand_components(word);
    BoundReport rep;
    rep.flavor = "loop";
    rep.total_strands = word.strands;
    rep.word_length = word.length();
    rep.sigma_incidence = sigma_incidence_counts(word, decomp);
    long long total = 0;
    for (int c = 0; c < decomp.component_count(); ++c) {
        rep.component_strands.push_back(decomp.strand_count(c));
        const long long term =
            bound_term_clamped(decomp.strand_count(c), word.length(), word.strands);
        rep.contributions.push_back(term);
        total += term;
    }
    rep.bound = 2 * total;
    return rep;
}

BoundReport loop_holomorphic_degree_bound(const LoopBraidWord& word) {
    BoundReport rep = loop_degree_bound(word);
    rep.flavor = "loop-holomorphic";
    // The cleared circle-denominator power adds the unclamped node-count term
    // of every component on top of the folded-form estimate.
    long long extra = 0;
    for (int c = 0; c < static_cast<int>(rep.component_strands.size()); ++c)
        extra += bound_term(rep.component_strands[c], rep.word_length,
                            rep.total_strands);
    rep.bound += 2 * extra;
    return rep;
}

BoundReport spin_degree_bound(const ClassicalBraidWord& word, int n) {
    BoundReport rep = loop_holomorphic_degree_bound(as_loop_word(word));
    rep.flavor = "spin";
    rep.spin = n;
    rep.bound += std::abs(n);
    return rep;
}

BoundReport satellite_degree_bound(const LoopBraidWord& word,
                                   const std::vector<ClassicalBraidWord>& fills) {
    const auto decomp = strand_components(word);
    if (static_cast<int>(fills.size()) != decomp.component_count())
        throw std::invalid_argument(
            "satellite-construction: one filling word per closure component required");
    BoundReport rep;
    rep.flavor = "satellite";
    rep.total_strands = word.strands;
    rep.word_length = word.length();
    rep.sigma_incidence = sigma_incidence_counts(word, decomp);
    long long total = 0;
    for (int c = 0; c < decomp.component_count(); ++c) {
        rep.component_strands.push_back(decomp.strand_count(c));
        const auto inner_decomp = strand_components(fills[c]);
        long long inner = 0;
        for (int ic = 0; ic < inner_decomp.component_count(); ++ic)
            inner += bound_term_clamped(inner_decomp.strand_count(ic),
                                        fills[c].length(), fills[c].strands);
        const long long outer =
            bound_term_clamped(decomp.strand_count(c), word.length(), word.strands);
        const long long contribution = 2 * inner * outer;
        rep.contributions.push_back(contribution);
        total += contribution;
    }
    rep.bound = total;
    return rep;
}

long long one_component_degree_bound(int strands, int length) {
    const long long s = strands, l = length;
    return 2 * floor_div((s + 1) * (s * l - 1) - 1, 2);
}

ConstructionResult algorithm0(const ClassicalBraidWord& word,
                              const ConstructOptions& opts) {
    StrandSystem sys = classical_strand_system(word, opts.strand);
    const double lambda = resolve_lambda(opts.lambda);
    const std::vector<std::string> vars{"u", "v"};

    LaurentPoly g = LaurentPoly::constant(vars, 1.0);
    for (int c = 0; c < sys.component_count(); ++c) {
        g = g * monic_component(sys, c, Coeff(lambda), 0, vars, opts.prune_rel_tol);
        g.prune(opts.prune_rel_tol);
    }

    ConstructionResult res;
    res.algorithm = "classical";
    res.lambda = lambda;
    res.g = std::move(g);
    res.f = subst_unit_circle(res.g);
    auto holo = subst_holomorphic(res.g);
    res.f_tilde = std::move(holo.numerator);
    res.f_tilde_denominator_power = holo.denominator_power;
    res.system = std::move(sys);
    res.degree = degrees(res.f);
    res.bound = classical_degree_bound(word);
    return res;
}

namespace {

ConstructionResult loop_construction(const LoopBraidWord& word,
                                     const ConstructOptions& opts,
                                     bool holomorphic_flavor) {
    StrandSystem sys = loop_strand_system(word, opts.strand);
    const std::vector<std::string> vars{"x", "y", "z", "v"};

    auto build_g = [&](double lam) {
        LaurentPoly g = LaurentPoly::constant(vars, 1.0);
        for (int c = 0; c < sys.component_count(); ++c) {
            g = g * ring_component(sys, c, lam, vars, opts.prune_rel_tol);
            g.prune(opts.prune_rel_tol);
        }
        return g;
    };

    double lambda;
    if (opts.lambda) {
        lambda = resolve_lambda(opts.lambda);
    } else {
        const LaurentPoly f1 = subst_unit_circle(build_g(1.0));
        const VerifyConfig cfg;
        const auto seeds = ring_seeds(sys, 1.0, cfg.t_samples, cfg.ring_angles);
        const auto dense =
            ring_seeds(sys, 1.0, cfg.cert_t_samples, cfg.cert_ring_angles);
        const LambdaSelection sel = select_lambda(f1, seeds, dense, cfg);
        if (!sel.pass)
            throw std::runtime_error("scale-selection: " + sel.note);
        lambda = sel.lambda;
    }

    ConstructionResult res;
    res.algorithm = holomorphic_flavor ? "loop-holomorphic" : "loop";
    res.lambda = lambda;
    res.g = build_g(lambda);
    res.f = subst_unit_circle(res.g);
    auto holo = subst_holomorphic(res.g);
    res.f_tilde = std::move(holo.numerator);
    res.f_tilde_denominator_power = holo.denominator_power;
    res.system = std::move(sys);
    res.degree = degrees(holomorphic_flavor ? *res.f_tilde : res.f);
    res.bound = holomorphic_flavor ? loop_holomorphic_degree_bound(word)
                                   : loop_degree_bound(word);
    return res;
}

}  // namespace

ConstructionResult algorithm1(const LoopBraidWord& word,
                              const ConstructOptions& opts) {
    return loop_construction(word, opts, false);
}

ConstructionResult algorithm1_holomorphic(const LoopBraidWord& word,
                                          const ConstructOptions& opts) {
    return loop_construction(word, opts, true);
}

ConstructionResult algorithm2(const ClassicalBraidWord& word, int n,
                              const ConstructOptions& opts) {
    StrandSystem sys = classical_strand_system(word, opts.strand);
    const double lambda = resolve_lambda(opts.lambda);
    const std::vector<std::string> vars{"u", "v", "w"};

    LaurentPoly g = LaurentPoly::constant(vars, 1.0);
    for (int c = 0; c < sys.component_count(); ++c) {
        g = g * monic_component(sys, c, Coeff(lambda), n, vars, opts.prune_rel_tol);
        g.prune(opts.prune_rel_tol);
    }

    ConstructionResult res;
    res.algorithm = "spin";
    res.lambda = lambda;
    res.g = std::move(g);
    auto holo = subst_holomorphic(res.g);
    res.f = std::move(holo.numerator);
    res.f_denominator_v_power = holo.denominator_power;
    if (res.f.min_exponent("w") < 0) {
        auto [shifted, power] = res.f.clear_var_denominator("w");
        res.f = std::move(shifted);
        res.f_denominator_w_power = power;
    }
    res.system = std::move(sys);
    res.degree = degrees(res.f);
    res.bound = spin_degree_bound(word, n);
    return res;
}

ConstructionResult torus_builder(const std::vector<TorusComponentInput>& comps,
                                 double prune_rel_tol) {
    if (comps.empty())
        throw std::invalid_argument("torus-construction: no components");
    for (const auto& comp : comps)
        if (comp.s_phi < 1 || comp.s_chi < 1)
            throw std::invalid_argument("torus-construction: sheet counts must be positive");

    // Disjointness precheck: every strand sheet value at every grid node must
    // stay separated from every other sheet.
    constexpr int kGrid = 128;
    constexpr double kCollisionTol = 1e-9;
    for (int gp = 0; gp < kGrid; ++gp) {
        const double phi = kTau * gp / kGrid;
        for (int gc = 0; gc < kGrid; ++gc) {
            const double chi = kTau * gc / kGrid;
            std::vector<Coeff> values;
            for (const auto& comp : comps)
                for (int j = 0; j < comp.s_phi; ++j)
                    for (int k = 0; k < comp.s_chi; ++k) {
                        const double a = (phi + kTau * j) / comp.s_phi;
                        const double b = (chi + kTau * k) / comp.s_chi;
                        values.push_back(comp.F.eval_complex(a, b) +
                                         Coeff(0.0, 1.0) * comp.G.eval_complex(a, b));
                    }
            for (std::size_t i = 0; i < values.size(); ++i)
                for (std::size_t l = i + 1; l < values.size(); ++l)
                    if (std::abs(values[i] - values[l]) < kCollisionTol)
                        throw std::runtime_error(
                            "torus-construction: strand collision on grid");
        }
    }

    const std::vector<std::string> vars{"u", "v", "w"};
    LaurentPoly g = LaurentPoly::constant(vars, 1.0);
    for (const auto& comp : comps) {
        const auto roots_phi = unity_roots(comp.s_phi);
        const auto roots_chi = unity_roots(comp.s_chi);
        LaurentPoly prod = LaurentPoly::constant(vars, 1.0);
        for (int j = 0; j < comp.s_phi; ++j)
            for (int k = 0; k < comp.s_chi; ++k) {
                LaurentPoly sheet(vars);
                std::vector<int> exps(vars.size(), 0);
                auto add_terms = [&](const TorusTrigPoly& p, Coeff scale) {
                    for (const auto& [key, c] : p.terms()) {
                        const auto [m, n] = key;
                        exps[1] = m;
                        exps[2] = n;
                        sheet.add_term(
                            exps,
                            scale * c *
                                roots_phi[mod_index(static_cast<long long>(j) * m,
                                                    comp.s_phi)] *
                                roots_chi[mod_index(static_cast<long long>(k) * n,
                                                    comp.s_chi)]);
                    }
                };
                add_terms(comp.F, Coeff(1.0));
                add_terms(comp.G, Coeff(0.0, 1.0));
                exps[1] = exps[2] = 0;
                LaurentPoly factor = axis_monomial(vars, 0, 1.0) - sheet;
                prod = prod * factor;
                prod.prune(prune_rel_tol);
            }
        prod = prod.rescale_exponents("v", comp.s_phi);
        prod = prod.rescale_exponents("w", comp.s_chi);
        g = g * prod;
        g.prune(prune_rel_tol);
    }

    ConstructionResult res;
    res.algorithm = "torus";
    res.g = std::move(g);
    res.f = res.g;
    if (res.f.min_exponent("v") < 0) {
        auto [shifted, power] = res.f.clear_var_denominator("v");
        res.f = std::move(shifted);
        res.f_denominator_v_power = power;
    }
    if (res.f.min_exponent("w") < 0) {
        auto [shifted, power] = res.f.clear_var_denominator("w");
        res.f = std::move(shifted);
        res.f_denominator_w_power = power;
    }
    res.degree = degrees(res.f);
    return res;
}

ConstructionResult satellite_builder(const LoopBraidWord& word,
                                     const std::vector<ClassicalBraidWord>& fills,
                                     const ConstructOptions& opts) {
    StrandSystem sys = loop_strand_system(word, opts.strand);
    if (static_cast<int>(fills.size()) != sys.component_count())
        throw std::invalid_argument(
            "satellite-construction: one filling word per closure component required");

    std::vector<SatelliteFactor> factors;
    factors.reserve(fills.size());
    for (const auto& fill : fills) factors.push_back(make_filling(fill, opts));

    const std::vector<std::string> vars{"x", "y", "z", "v"};
    auto build_g = [&](double lam) {
        LaurentPoly g = LaurentPoly::constant(vars, 1.0);
        for (int c = 0; c < sys.component_count(); ++c) {
            g = g * satellite_component(sys, c, factors[c], lam, vars,
                                        opts.prune_rel_tol);
            g.prune(opts.prune_rel_tol);
        }
        return g;
    };

    ConstructionResult res;
    res.algorithm = "satellite";
    res.lambda = resolve_lambda(opts.lambda);
    res.g = build_g(res.lambda);
    res.f = subst_unit_circle(res.g);
    res.system = std::move(sys);
    res.satellite_factors = std::move(factors);
    res.degree = degrees(res.f);
    res.bound = satellite_degree_bound(word, fills);

    if (!opts.lambda) {
        // Automatic scale: rebuild once the unscaled geometry has been
        // certified, seeding the tracker with the filling strand points.
        const VerifyConfig cfg;
        const auto build_seeds = [&](int t_samples, int curve_samples) {
            std::vector<SliceSeed> seeds;
            for (int c = 0; c < res.system->component_count(); ++c)
                for (int j = 0; j < res.system->strands_of(c); ++j) {
                    const auto pts = satellite_strand_points(res, c, j,
                                                             t_samples,
                                                             curve_samples);
                    const int per_t = static_cast<int>(pts.size()) / t_samples;
                    for (int it = 0; it < t_samples; ++it) {
                        const double t = kTau * it / t_samples;
                        for (int ip = 0; ip < per_t; ++ip)
                            seeds.push_back(SliceSeed{
                                t, c * 1000 + j, pts[it * per_t + ip],
                                res.lambda * res.system->x_of(c, j, t),
                                res.lambda * res.system->y_of(c, j, t), true});
                    }
                }
            return seeds;
        };
        const LambdaSelection sel = select_lambda(
            res.f, build_seeds(cfg.t_samples, cfg.ring_angles),
            build_seeds(cfg.cert_t_samples, cfg.cert_ring_angles), cfg);
        if (!sel.pass)
            throw std::runtime_error("scale-selection: " + sel.note);
        res.lambda = sel.lambda;
        res.g = build_g(res.lambda);
        res.f = subst_unit_circle(res.g);
        res.degree = degrees(res.f);
    }
    return res;
}

std::vector<Vec3> satellite_strand_points(const ConstructionResult& res, int c,
                                          int j, int t_samples,
                                          int curve_samples) {
    if (!res.system || res.satellite_factors.empty())
        throw std::invalid_argument(
            "satellite-sampling: result carries no satellite data");
    const StrandSystem& sys = *res.system;
    const SatelliteFactor& sf = res.satellite_factors.at(c);
    const double lambda = res.lambda;

    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(t_samples) * curve_samples);

    for (int it = 0; it < t_samples; ++it) {
        const double t = kTau * it / t_samples;
        const double xc = sys.x_of(c, j, t);
        const double yc = sys.y_of(c, j, t);
        const double zc = sys.z_of(c, j, t);
        const double rho = sys.radius_of(c, j, t);

        if (!sf.inner_f) {
            // Trivial filling: the tube core circle itself.
            for (int ip = 0; ip < curve_samples; ++ip) {
                const double a = kTau * ip / curve_samples;
                out.push_back(Vec3{lambda * (xc + rho * std::cos(a)),
                                   lambda * (yc + rho * std::sin(a)),
                                   lambda * zc});
            }
            continue;
        }

        const LaurentPoly& fin = *sf.inner_f;  // vars u, v, vbar
        for (int ip = 0; ip < curve_samples; ++ip) {
            const double tt = kTau * ip / curve_samples;
            auto slice_roots = [&](double r) {
                return fibre_slice_roots(fin, std::polar(r, tt));
            };
            // Greedy proximity matching keeps a consistent root order while
            // the radius moves.
            auto match = [](const std::vector<Coeff>& prev,
                            std::vector<Coeff> cur) {
                std::vector<Coeff> out(prev.size());
                std::vector<bool> used(cur.size(), false);
                for (std::size_t j = 0; j < prev.size(); ++j) {
                    std::size_t best = 0;
                    double dist = std::numeric_limits<double>::infinity();
                    for (std::size_t k = 0; k < cur.size(); ++k) {
                        if (used[k]) continue;
                        const double d = std::abs(cur[k] - prev[j]);
                        if (d < dist) {
                            dist = d;
                            best = k;
                        }
                    }
                    used[best] = true;
                    out[j] = cur[best];
                }
                return out;
            };

            // The sphere intersection along each tracked root: |u(r)|^2 + r^2
            // rises above 1 at the unit radius and falls below it towards the
            // axis; bracket the crossing on a coarse march, then bisect.
            std::vector<Coeff> prev = slice_roots(1.0);
            const std::size_t nroots = prev.size();
            std::vector<bool> done(nroots, false);
            std::vector<Coeff> root_u(nroots);
            std::vector<double> root_r(nroots, 0.0);
            auto sphere_gap = [](const Coeff& u, double r) {
                return std::norm(u) + r * r - 1.0;
            };
            std::vector<double> gap_prev(nroots);
            std::size_t remaining = nroots;
            for (std::size_t j = 0; j < nroots; ++j) {
                gap_prev[j] = sphere_gap(prev[j], 1.0);
                if (std::abs(gap_prev[j]) < 1e-14) {
                    root_u[j] = prev[j];
                    root_r[j] = 1.0;
                    done[j] = true;
                    --remaining;
                }
            }
            const int coarse = 64;
            double r_hi = 1.0;
            for (int stepi = 1; stepi <= coarse && remaining > 0; ++stepi) {
                const double r_lo = 1.0 - static_cast<double>(stepi) / coarse;
                const std::vector<Coeff> cur = match(prev, slice_roots(r_lo));
                for (std::size_t j = 0; j < nroots; ++j) {
                    if (done[j]) continue;
                    const double gap_lo = sphere_gap(cur[j], r_lo);
                    if ((gap_prev[j] > 0.0) == (gap_lo > 0.0)) {
                        gap_prev[j] = gap_lo;
                        continue;
                    }
                    double lo = r_lo, hi = r_hi;
                    Coeff u_ref = cur[j];
                    for (int bi = 0; bi < 60 && hi - lo > 1e-14; ++bi) {
                        const double mid = 0.5 * (lo + hi);
                        const std::vector<Coeff> at_mid =
                            match({u_ref}, slice_roots(mid));
                        u_ref = at_mid[0];
                        if ((sphere_gap(u_ref, mid) > 0.0) == (gap_prev[j] > 0.0))
                            hi = mid;
                        else
                            lo = mid;
                    }
                    root_u[j] = u_ref;
                    root_r[j] = 0.5 * (lo + hi);
                    done[j] = true;
                    --remaining;
                }
                prev = cur;
                r_hi = r_lo;
            }
            if (remaining > 0)
                throw std::runtime_error(
                    "satellite-sampling: no sphere intersection along the tube "
                    "fibre");

            for (std::size_t j = 0; j < nroots; ++j) {
                // Stereographic chart back to 3-space, then into the tube.
                const double a = root_u[j].real();
                const double b = root_u[j].imag();
                const double r = root_r[j];
                const double denom = 1.0 - a;
                const double X = r * std::cos(tt) / denom;
                const double Y = r * std::sin(tt) / denom;
                const double Z = b / denom;
                out.push_back(Vec3{lambda * (xc + rho * X), lambda * (yc + rho * Y),
                                   lambda * (zc + Z)});
            }
        }
    }
    return out;
}

}  // namespace braidforge
