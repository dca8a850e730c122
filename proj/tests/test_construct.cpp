#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "braidforge/construct.hpp"
#include "braidforge/util.hpp"

using namespace braidforge;

namespace {

using Coeff = std::complex<double>;

const char* kWhiteheadWord = "s1^-1 s2 s1^-1 s2 s1^-1";
const char* kLoopWord = "r1^-1 r2 s1 r2 r1^-1";
const char* kTrefoilWord = "s1 s1 s1";

Coeff eval_at(const LaurentPoly& f, const std::map<std::string, Coeff>& vals) {
    std::vector<Coeff> v;
    v.reserve(f.vars().size());
    for (const auto& name : f.vars()) v.push_back(vals.at(name));
    return f.eval(v);
}

// Magnitude budget at a point: sum of |coeff| * |value|^exponent. Residuals
// of exact cancellations are judged relative to this.
double eval_abs(const LaurentPoly& f, const std::map<std::string, Coeff>& vals) {
    std::vector<double> mags;
    mags.reserve(f.vars().size());
    for (const auto& name : f.vars()) mags.push_back(std::abs(vals.at(name)));
    double total = 0.0;
    for (const auto& [e, c] : f.terms()) {
        double m = std::abs(c);
        for (std::size_t i = 0; i < mags.size(); ++i)
            m *= std::pow(mags[i], e[i]);
        total += m;
    }
    return total;
}

std::map<std::string, Coeff> spatial_values(const Vec3& p, double t) {
    const Coeff v = std::polar(1.0, t);
    return {{"x", Coeff(p.x)}, {"y", Coeff(p.y)}, {"z", Coeff(p.z)},
            {"v", v},          {"vbar", std::conj(v)}};
}

Vec3 ring_point(const StrandSystem& sys, int c, int j, double t, double phi,
                double lambda) {
    const double rr = sys.radius_of(c, j, t);
    return {lambda * (sys.x_of(c, j, t) + rr * std::cos(phi)),
            lambda * (sys.y_of(c, j, t) + rr * std::sin(phi)),
            lambda * sys.z_of(c, j, t)};
}

int deg_of(const DegreeReport& rep, const std::string& name) {
    for (std::size_t i = 0; i < rep.vars.size(); ++i)
        if (rep.vars[i] == name) return rep.var_degree[i];
    return 0;
}

// Largest exponent sum restricted to the spatial variables.
int spatial_degree(const LaurentPoly& f) {
    const int ix = f.var_index("x");
    const int iy = f.var_index("y");
    const int iz = f.var_index("z");
    int best = 0;
    for (const auto& [e, c] : f.terms()) {
        (void)c;
        int d = 0;
        if (ix >= 0) d += e[ix];
        if (iy >= 0) d += e[iy];
        if (iz >= 0) d += e[iz];
        best = std::max(best, d);
    }
    return best;
}

ClassicalBraidWord trivial_fill() { return ClassicalBraidWord{1, {}}; }

}  // namespace

TEST_CASE("two strand plane curve vanishes on its strands") {
    const auto word = parse_classical_word("s1", 2);
    ConstructOptions opts;
    opts.lambda = 0.5;
    const auto res = algorithm0(word, opts);

    CHECK(res.algorithm == "classical");
    CHECK(res.lambda == 0.5);
    CHECK(deg_of(res.degree, "u") == 2);
    REQUIRE(res.system.has_value());
    const StrandSystem& sys = *res.system;
    for (int j = 0; j < 2; ++j) {
        for (int it = 0; it < 32; ++it) {
            const double t = kTau * it / 32;
            const Coeff u0(0.5 * sys.x_of(0, j, t), 0.5 * sys.y_of(0, j, t));
            const Coeff v = std::polar(1.0, t);
            const auto val = eval_at(
                res.f, {{"u", u0}, {"v", v}, {"vbar", std::conj(v)}});
            CHECK(std::abs(val) < 1e-9);
        }
    }
}

TEST_CASE("classical example stays under its degree estimate") {
    const auto word = parse_classical_word(kWhiteheadWord, 3);
    const auto res = algorithm0(word);

    REQUIRE(res.bound.has_value());
    const BoundReport& bound = *res.bound;
    CHECK(bound.flavor == "classical");
    CHECK(bound.bound == 26);
    REQUIRE(bound.contributions.size() == 2);
    CHECK(bound.contributions[0] == 8);
    CHECK(bound.contributions[1] == 18);
    CHECK(bound.component_strands == std::vector<int>{1, 2});

    CHECK(deg_of(res.degree, "u") == 3);
    CHECK(res.degree.total_degree <= bound.bound);

    // The numerator form reproduces the product on the circle.
    REQUIRE(res.f_tilde.has_value());
    CHECK(res.f_tilde->min_exponent("v") >= 0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0.0, kTau);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (int i = 0; i < 32; ++i) {
        const Coeff u0(box(rng), box(rng));
        const double t = ang(rng);
        const Coeff v = std::polar(1.0, t);
        const auto vg = eval_at(res.g, {{"u", u0}, {"v", v}});
        const auto vf = eval_at(
            res.f, {{"u", u0}, {"v", v}, {"vbar", std::conj(v)}});
        const auto vt = eval_at(*res.f_tilde, {{"u", u0}, {"v", v}}) *
                        std::pow(v, -res.f_tilde_denominator_power);
        const double scale =
            1.0 + eval_abs(res.g, {{"u", u0}, {"v", v}});
        CHECK(std::abs(vf - vg) < 1e-11 * scale);
        CHECK(std::abs(vt - vg) < 1e-11 * scale);
    }
}

TEST_CASE("ring product vanishes on the example rings") {
    const auto word = parse_loop_word(kLoopWord, 3);
    ConstructOptions opts;
    opts.lambda = 0.7;
    const auto res = algorithm1(word, opts);

    CHECK(res.algorithm == "loop");
    REQUIRE(res.system.has_value());
    const StrandSystem& sys = *res.system;

    for (int c = 0; c < sys.component_count(); ++c)
        for (int j = 0; j < sys.strands_of(c); ++j)
            for (int it = 0; it < 64; ++it)
                for (int ip = 0; ip < 16; ++ip) {
                    const double t = kTau * it / 64;
                    const double phi = kTau * ip / 16;
                    const Vec3 p = ring_point(sys, c, j, t, phi, 0.7);
                    const auto vals = spatial_values(p, t);
                    const double budget = eval_abs(res.f, vals);
                    CHECK(std::abs(eval_at(res.f, vals)) < 1e-9 * budget);
                }

    // Folded form agrees with the product form away from the rings.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ang(0.0, kTau);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (int i = 0; i < 64; ++i) {
        const Vec3 p{box(rng), box(rng), box(rng)};
        const double t = ang(rng);
        const auto vals = spatial_values(p, t);
        const auto vg = eval_at(res.g, vals);
        const auto vf = eval_at(res.f, vals);
        CHECK(std::abs(vf - vg) < 1e-11 * (1.0 + eval_abs(res.g, vals)));
    }
}

TEST_CASE("single letter loop word meets its estimate exactly") {
    const auto word = parse_loop_word("s1", 2);
    const auto bound = loop_degree_bound(word);
    CHECK(bound.bound == 4);

    ConstructOptions opts;
    opts.lambda = 1.0;
    const auto res = algorithm1(word, opts);
    CHECK(spatial_degree(res.f) == 4);
    CHECK(res.degree.total_degree >= 4);
}

TEST_CASE("loop example degree estimate") {
    const auto word = parse_loop_word(kLoopWord, 3);
    const auto bound = loop_degree_bound(word);
    CHECK(bound.flavor == "loop");
    CHECK(bound.bound == 52);
    REQUIRE(bound.contributions.size() == 2);
    CHECK(bound.contributions[0] == 8);
    CHECK(bound.contributions[1] == 18);
    CHECK(bound.component_strands == std::vector<int>{1, 2});
    CHECK(bound.sigma_incidence == std::vector<int>{0, 2});

    ConstructOptions opts;
    opts.lambda = 0.7;
    const auto res = algorithm1(word, opts);
    CHECK(res.degree.total_degree <= bound.bound);
}

TEST_CASE("holomorphic numerator matches the folded form on the circle") {
    const auto word = parse_loop_word(kLoopWord, 3);
    ConstructOptions opts;
    opts.lambda = 0.7;
    const auto res = algorithm1_holomorphic(word, opts);

    CHECK(res.algorithm == "loop-holomorphic");
    REQUIRE(res.f_tilde.has_value());
    const LaurentPoly& ft = *res.f_tilde;
    CHECK(ft.min_exponent("v") >= 0);
    CHECK(ft.var_index("vbar") == -1);

    REQUIRE(res.bound.has_value());
    CHECK(res.bound->bound == 104);
    CHECK(res.degree.total_degree <= 104);

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ang(0.0, kTau);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (int i = 0; i < 64; ++i) {
        const Vec3 p{box(rng), box(rng), box(rng)};
        const double t = ang(rng);
        const auto vals = spatial_values(p, t);
        const Coeff v = std::polar(1.0, t);
        const auto lhs = eval_at(ft, vals);
        const auto rhs =
            eval_at(res.f, vals) * std::pow(v, res.f_tilde_denominator_power);
        CHECK(std::abs(lhs - rhs) < 1e-11 * (1.0 + eval_abs(ft, vals)));
    }
}

TEST_CASE("spun construction with no twist degenerates to the plane curve") {
    const auto word = parse_classical_word(kWhiteheadWord, 3);
    const auto flat = algorithm0(word);
    const auto spun = algorithm2(word, 0);

    CHECK(spun.f_denominator_w_power == 0);
    CHECK(deg_of(spun.degree, "w") == 0);
    const LaurentPoly g0 = flat.g.with_vars({"u", "v", "w"});
    const LaurentPoly diff = spun.g - g0;
    CHECK(diff.max_abs_coeff() <= 1e-12 * flat.g.max_abs_coeff());
}

TEST_CASE("spun example carries one twist power per strand") {
    const auto word = parse_classical_word(kWhiteheadWord, 3);
    const auto res = algorithm2(word, 1);

    REQUIRE(res.bound.has_value());
    CHECK(res.bound->flavor == "spin");
    CHECK(res.bound->spin == 1);
    CHECK(res.bound->bound == 105);
    CHECK(deg_of(res.degree, "u") == 3);
    CHECK(deg_of(res.degree, "w") == 3);
    CHECK(res.degree.total_degree <= 105);
    CHECK(res.f.min_exponent("v") >= 0);
    CHECK(res.f.min_exponent("w") >= 0);
}

TEST_CASE("spun numerator reproduces the product on the torus") {
    const auto word = parse_classical_word(kTrefoilWord, 2);
    const auto res = algorithm2(word, 2);

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ang(0.0, kTau);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (int i = 0; i < 64; ++i) {
        const Coeff u0(box(rng), box(rng));
        const Coeff v = std::polar(1.0, ang(rng));
        const Coeff w = std::polar(1.0, ang(rng));
        const std::map<std::string, Coeff> vals{{"u", u0}, {"v", v}, {"w", w}};
        const auto vg = eval_at(res.g, vals);
        const auto vf = eval_at(res.f, vals) *
                        std::pow(v, -res.f_denominator_v_power) *
                        std::pow(w, -res.f_denominator_w_power);
        CHECK(std::abs(vf - vg) < 1e-11 * (1.0 + eval_abs(res.g, vals)));
    }
}

TEST_CASE("constant torus sheets give a plain product") {
    std::vector<TorusComponentInput> comps(2);
    comps[0].F = TorusTrigPoly(0.5);
    comps[0].G = TorusTrigPoly(0.25);
    comps[1].F = TorusTrigPoly(-1.0);
    comps[1].G = TorusTrigPoly(0.75);
    const auto res = torus_builder(comps);

    LaurentPoly want({"u", "v", "w"});
    const Coeff c1(0.5, 0.25), c2(-1.0, 0.75);
    want.add_term({2, 0, 0}, 1.0);
    want.add_term({1, 0, 0}, -(c1 + c2));
    want.add_term({0, 0, 0}, c1 * c2);
    const LaurentPoly diff = res.g - want;
    CHECK(diff.max_abs_coeff() <= 1e-12);
}

TEST_CASE("single torus sheet with twist is a pure monomial difference") {
    TorusComponentInput comp;
    comp.F.add_term(1, 2, 0.5);
    comp.F.add_term(-1, -2, 0.5);
    comp.G.add_term(1, 2, Coeff(0.0, -0.5));
    comp.G.add_term(-1, -2, Coeff(0.0, 0.5));
    const auto res = torus_builder({comp});

    LaurentPoly want({"u", "v", "w"});
    want.add_term({1, 0, 0}, 1.0);
    want.add_term({0, 1, 2}, -1.0);
    CHECK((res.g - want).max_abs_coeff() <= 1e-12);

    for (int ip = 0; ip < 16; ++ip)
        for (int ic = 0; ic < 16; ++ic) {
            const double phi = kTau * ip / 16;
            const double chi = kTau * ic / 16;
            const auto val = eval_at(res.g, {{"u", std::polar(1.0, phi + 2 * chi)},
                                             {"v", std::polar(1.0, phi)},
                                             {"w", std::polar(1.0, chi)}});
            CHECK(std::abs(val) < 1e-9);
        }
}

TEST_CASE("torus builder agrees with the spun construction") {
    const auto word = parse_classical_word(kTrefoilWord, 2);
    const int n = 2;
    const auto spun = algorithm2(word, n);
    REQUIRE(spun.system.has_value());
    const TrigPoly& F = spun.system->comps[0].F;
    const TrigPoly& G = spun.system->comps[0].G;

    TorusComponentInput comp;
    comp.F = TorusTrigPoly::from_phi_poly(F) * TorusTrigPoly::harmonic_cos_chi(n) -
             TorusTrigPoly::from_phi_poly(G) * TorusTrigPoly::harmonic_sin_chi(n);
    comp.G = TorusTrigPoly::from_phi_poly(F) * TorusTrigPoly::harmonic_sin_chi(n) +
             TorusTrigPoly::from_phi_poly(G) * TorusTrigPoly::harmonic_cos_chi(n);
    comp.s_phi = 2;
    comp.s_chi = 1;
    const auto res = torus_builder({comp});

    const LaurentPoly diff = res.g - spun.g;
    CHECK(diff.max_abs_coeff() <= 1e-9 * spun.g.max_abs_coeff());
}

TEST_CASE("colliding torus sheets are rejected") {
    std::vector<TorusComponentInput> comps(2);
    comps[0].F = TorusTrigPoly(0.5);
    comps[0].G = TorusTrigPoly(0.25);
    comps[1].F = TorusTrigPoly(0.5);
    comps[1].G = TorusTrigPoly(0.25);
    CHECK_THROWS_AS(torus_builder(comps), std::runtime_error);

    TorusComponentInput bad;
    bad.F = TorusTrigPoly(1.0);
    bad.s_phi = 0;
    CHECK_THROWS_AS(torus_builder({bad}), std::invalid_argument);
}

TEST_CASE("trivial tube fillings reproduce the ring estimate") {
    const auto word = parse_loop_word(kLoopWord, 3);
    const std::vector<ClassicalBraidWord> fills{trivial_fill(), trivial_fill()};

    const auto bound = satellite_degree_bound(word, fills);
    CHECK(bound.flavor == "satellite");
    CHECK(bound.bound == 52);
    REQUIRE(bound.contributions.size() == 2);
    CHECK(bound.contributions[0] == 16);
    CHECK(bound.contributions[1] == 36);

    ConstructOptions opts;
    opts.lambda = 0.5;
    const auto res = satellite_builder(word, fills, opts);
    CHECK(res.algorithm == "satellite");
    CHECK(res.degree.total_degree <= bound.bound);
    REQUIRE(res.satellite_factors.size() == 2);
    CHECK(res.satellite_factors[0].degree == 2);
    CHECK(!res.satellite_factors[0].inner_f.has_value());

    REQUIRE(res.system.has_value());
    for (int c = 0; c < res.system->component_count(); ++c)
        for (int j = 0; j < res.system->strands_of(c); ++j) {
            const auto pts = satellite_strand_points(res, c, j, 24, 8);
            REQUIRE(pts.size() == 24u * 8u);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double t = kTau * static_cast<double>(i / 8) / 24;
                const auto vals = spatial_values(pts[i], t);
                const double budget = eval_abs(res.f, vals);
                CHECK(std::abs(eval_at(res.f, vals)) < 1e-9 * budget);
            }
        }
}

TEST_CASE("filled tube vanishes on the filling strands") {
    const auto word = parse_loop_word(kLoopWord, 3);
    const std::vector<ClassicalBraidWord> fills{
        parse_classical_word(kTrefoilWord, 2), trivial_fill()};

    const auto bound = satellite_degree_bound(word, fills);
    CHECK(bound.bound == 148);
    REQUIRE(bound.contributions.size() == 2);
    CHECK(bound.contributions[0] == 112);
    CHECK(bound.contributions[1] == 36);

    ConstructOptions opts;
    opts.lambda = 0.5;
    const auto res = satellite_builder(word, fills, opts);
    CHECK(res.degree.total_degree <= bound.bound);
    REQUIRE(res.satellite_factors.size() == 2);
    CHECK(res.satellite_factors[0].inner_f.has_value());

    REQUIRE(res.system.has_value());
    for (int c = 0; c < res.system->component_count(); ++c)
        for (int j = 0; j < res.system->strands_of(c); ++j) {
            const auto pts = satellite_strand_points(res, c, j, 12, 8);
            REQUIRE(!pts.empty());
            const std::size_t per_t = pts.size() / 12;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double t = kTau * static_cast<double>(i / per_t) / 12;
                const auto vals = spatial_values(pts[i], t);
                const double budget = eval_abs(res.f, vals);
                CHECK(std::abs(eval_at(res.f, vals)) < 1e-8 * budget);
            }
        }
}

TEST_CASE("random corpus stays under the estimates") {
    const auto corpus = random_loop_words(6, 4, 6, 0);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ang(0.0, kTau);
    std::uniform_real_distribution<double> box(-2.0, 2.0);

    for (const auto& word : corpus) {
        ConstructOptions opts;
        opts.lambda = 1.0;
        const auto res = algorithm1(word, opts);
        REQUIRE(res.bound.has_value());
        CHECK(res.degree.total_degree <= res.bound->bound);

        const StrandSystem& sys = *res.system;
        for (int c = 0; c < sys.component_count(); ++c)
            for (int j = 0; j < sys.strands_of(c); ++j)
                for (int it = 0; it < 16; ++it)
                    for (int ip = 0; ip < 8; ++ip) {
                        const double t = kTau * it / 16;
                        const double phi = kTau * ip / 8;
                        const Vec3 p = ring_point(sys, c, j, t, phi, 1.0);
                        const auto vals = spatial_values(p, t);
                        const double budget = eval_abs(res.f, vals);
                        CHECK(std::abs(eval_at(res.f, vals)) < 1e-9 * budget);
                    }

        for (int i = 0; i < 8; ++i) {
            const Vec3 p{box(rng), box(rng), box(rng)};
            const double t = ang(rng);
            const auto vals = spatial_values(p, t);
            const auto vg = eval_at(res.g, vals);
            const auto vf = eval_at(res.f, vals);
            CHECK(std::abs(vf - vg) < 1e-11 * (1.0 + eval_abs(res.g, vals)));
        }
    }
}

TEST_CASE("closed forms match the general estimate on one component closures") {
    CHECK(one_component_degree_bound(2, 3) == 14);
    const auto trefoil_loop = parse_loop_word(kTrefoilWord, 2);
    CHECK(loop_degree_bound(trefoil_loop).bound == 14);

    CHECK(one_component_degree_bound(3, 2) == 18);
    const auto cycle = parse_loop_word("s1 s2", 3);
    CHECK(loop_degree_bound(cycle).bound == 18);
}

TEST_CASE("construction input validation") {
    const auto word = parse_loop_word(kLoopWord, 3);
    CHECK_THROWS_AS(satellite_builder(word, {trivial_fill()}, {}),
                    std::invalid_argument);

    ClassicalBraidWord bad_fill{1, {BraidToken{TokenKind::sigma, 1, 1}}};
    ConstructOptions opts;
    opts.lambda = 0.5;
    CHECK_THROWS_AS(
        satellite_builder(word, {bad_fill, trivial_fill()}, opts),
        std::invalid_argument);

    ConstructOptions neg;
    neg.lambda = -1.0;
    CHECK_THROWS_AS(algorithm0(parse_classical_word("s1", 2), neg),
                    std::invalid_argument);
    CHECK_THROWS_AS(torus_builder({}), std::invalid_argument);
}
