#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "braidforge/construct.hpp"
#include "braidforge/util.hpp"
#include "braidforge/verify.hpp"

using namespace braidforge;

namespace {

using Coeff = std::complex<double>;

const char* kLoopWord = "r1^-1 r2 s1 r2 r1^-1";
const char* kWhiteheadWord = "s1^-1 s2 s1^-1 s2 s1^-1";

// Slimmed sampling grids keep the suite quick; the defaults are exercised by
// the acceptance run.
VerifyConfig quick_cfg() {
    VerifyConfig cfg;
    cfg.t_samples = 24;
    cfg.ring_angles = 8;
    cfg.cert_t_samples = 64;
    cfg.cert_ring_angles = 64;
    return cfg;
}

LoopBraidWord loop_example() { return parse_loop_word(kLoopWord, 3); }

ClassicalBraidWord trivial_fill() { return ClassicalBraidWord{1, {}}; }

// Distance of a point to the ideal ring of its strand at circle sample t.
double ring_deviation(const StrandSystem& sys, int c, int j, double t,
                      double lambda, const Vec3& p) {
    const double dx = p.x - lambda * sys.x_of(c, j, t);
    const double dy = p.y - lambda * sys.y_of(c, j, t);
    const double dz = p.z - lambda * sys.z_of(c, j, t);
    const double planar = std::hypot(dx, dy);
    return std::max(std::abs(planar - lambda * sys.radius_of(c, j, t)),
                    std::abs(dz));
}

}  // namespace

TEST_CASE("polynomial roots: closed forms and companion fallback") {
    // (u - 2)(u + 3i) = u^2 + (3i - 2)u - 6i
    const auto quad = poly_roots({{0.0, -6.0}, {-2.0, 3.0}, {1.0, 0.0}});
    REQUIRE(quad.size() == 2);
    for (const Coeff want : {Coeff(2.0, 0.0), Coeff(0.0, -3.0)}) {
        double best = 1e9;
        for (const auto& r : quad) best = std::min(best, std::abs(r - want));
        CHECK(best < 1e-12);
    }

    const auto lin = poly_roots({{3.0, 0.0}, {-1.5, 0.0}});
    REQUIRE(lin.size() == 1);
    CHECK(std::abs(lin[0] - Coeff(2.0, 0.0)) < 1e-14);

    // u^3 - 1 with negligible higher coefficients to exercise trimming.
    const auto cubic = poly_roots(
        {{-1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {1e-20, 0.0}});
    REQUIRE(cubic.size() == 3);
    for (const auto& r : cubic) CHECK(std::abs(r * r * r - 1.0) < 1e-10);

    CHECK(poly_roots({}).empty());
    CHECK(poly_roots({{5.0, 0.0}}).empty());
}

TEST_CASE("unit-radius slice refinement converges on every ring seed") {
    ConstructOptions opts;
    opts.lambda = 0.7;
    const auto res = algorithm1(loop_example(), opts);
    const StrandSystem& sys = *res.system;
    const auto seeds = ring_seeds(sys, 0.7, 16, 8);
    const VerifyConfig cfg = quick_cfg();
    const SliceReport rep = slice_zeroes(res.f, 1.0, seeds, cfg);

    CHECK(rep.points.size() == seeds.size());
    CHECK(rep.failures == 0);
    CHECK(rep.max_residual < 1e-9);
    CHECK(rep.min_margin > cfg.margin_floor);
    CHECK(rep.min_cross_group_distance > 1e-3);
    CHECK(rep.max_norm > 0.5);

    // The refined points must stay on the rings they were seeded from.
    std::vector<std::pair<int, int>> strands;
    for (int c = 0; c < sys.component_count(); ++c)
        for (int j = 0; j < sys.strands_of(c); ++j) strands.push_back({c, j});
    for (const auto& p : rep.points) {
        REQUIRE(p.converged);
        const auto [c, j] = strands.at(static_cast<std::size_t>(p.group));
        CHECK(ring_deviation(sys, c, j, p.t, 0.7, p.point) < 1e-7);
    }
}

TEST_CASE("slice refinement reports a hopeless seed as a failure") {
    ConstructOptions opts;
    opts.lambda = 0.7;
    const auto res = algorithm1(loop_example(), opts);
    std::vector<SliceSeed> seeds{{0.0, 0, {1e8, 0.0, 0.0}}};
    const SliceReport rep = slice_zeroes(res.f, 1.0, seeds, quick_cfg());
    CHECK(rep.failures == 1);
    REQUIRE(rep.points.size() == 1);
    CHECK(!rep.points[0].converged);
}

TEST_CASE("spatial extent is degree-one homogeneous in the scale") {
    const auto word = loop_example();
    ConstructOptions o1, o2;
    o1.lambda = 0.4;
    o2.lambda = 0.8;
    const auto res1 = algorithm1(word, o1);
    const auto res2 = algorithm1(word, o2);
    const VerifyConfig cfg = quick_cfg();
    const SliceReport rep1 =
        slice_zeroes(res1.f, 1.0, ring_seeds(*res1.system, 0.4, 16, 8), cfg);
    const SliceReport rep2 =
        slice_zeroes(res2.f, 1.0, ring_seeds(*res2.system, 0.8, 16, 8), cfg);
    REQUIRE(rep1.failures == 0);
    REQUIRE(rep2.failures == 0);
    CHECK(rep2.max_norm ==
          doctest::Approx(2.0 * rep1.max_norm).epsilon(1e-9));
}

TEST_CASE("tracking reports are identical for every worker count") {
    ConstructOptions opts;
    opts.lambda = 0.7;
    const auto res = algorithm1(loop_example(), opts);
    const auto seeds = ring_seeds(*res.system, 0.7, 16, 8);
    VerifyConfig one = quick_cfg();
    one.threads = 1;
    VerifyConfig four = quick_cfg();
    four.threads = 4;
    const SliceReport a = slice_zeroes(res.f, 1.0, seeds, one);
    const SliceReport b = slice_zeroes(res.f, 1.0, seeds, four);
    REQUIRE(a.points.size() == b.points.size());
    CHECK(a.max_residual == b.max_residual);
    CHECK(a.min_margin == b.min_margin);
    CHECK(a.min_cross_group_distance == b.min_cross_group_distance);
    CHECK(a.max_norm == b.max_norm);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].point.x == b.points[i].point.x);
        CHECK(a.points[i].point.y == b.points[i].point.y);
        CHECK(a.points[i].point.z == b.points[i].point.z);
    }
}

TEST_CASE("scale selection certifies the unscaled ring construction") {
    ConstructOptions opts;
    opts.lambda = 1.0;
    const auto res = algorithm1(loop_example(), opts);
    const VerifyConfig cfg = quick_cfg();
    const auto seeds =
        ring_seeds(*res.system, 1.0, cfg.t_samples, cfg.ring_angles);
    const LambdaSelection sel = select_lambda(res.f, seeds, cfg);

    REQUIRE(sel.pass);
    CHECK(sel.lambda > 0.0);
    CHECK(sel.lambda <= cfg.lambda_cap);
    CHECK(sel.delta > 0.0);
    CHECK(sel.delta <= cfg.delta_target);
    CHECK(sel.spatial_extent > 0.0);
    CHECK(sel.allowance ==
          doctest::Approx(0.9 * std::sqrt(sel.delta * (2.0 - sel.delta)))
              .epsilon(1e-12));
    const double want = std::min(
        cfg.lambda_cap, cfg.safety * std::sqrt(sel.delta * (2.0 - sel.delta)) /
                            sel.spatial_extent);
    CHECK(sel.lambda == doctest::Approx(want).epsilon(1e-12));
    CHECK(sel.lambda * sel.spatial_extent < sel.allowance);
}

TEST_CASE("full verification passes on the automatically scaled ring pair") {
    const auto res = algorithm1(loop_example());
    const VerifyConfig cfg = quick_cfg();
    const VerificationReport rep = verify_construction(res, cfg);

    CHECK(rep.pass);
    CHECK(rep.containment_pass);
    CHECK(rep.selection.pass);
    CHECK(rep.extraction.match);
    CHECK(rep.extra_component_flags == 0);
    CHECK(!rep.fibration.has_value());
    REQUIRE(rep.slices.size() == 3);
    CHECK(rep.slices[0].r == doctest::Approx(1.0));
    CHECK(rep.slices[1].r ==
          doctest::Approx(1.0 - rep.selection.delta / 2.0).epsilon(1e-12));
    CHECK(rep.slices[2].r ==
          doctest::Approx(1.0 - rep.selection.delta).epsilon(1e-12));
    for (const auto& s : rep.slices) {
        CHECK(s.failures == 0);
        CHECK(s.max_residual <= cfg.residual_ceiling);
        CHECK(s.min_margin > cfg.margin_floor);
        CHECK(s.min_cross_group_distance > cfg.disjoint_floor);
    }
    CHECK(rep.selection.spatial_extent < rep.selection.allowance);

    // Ten-fold smaller scales stay certified.
    ConstructOptions small;
    small.lambda = res.lambda / 10.0;
    const auto res_small = algorithm1(loop_example(), small);
    CHECK(verify_construction(res_small, cfg).pass);
}

TEST_CASE("full verification passes on the holomorphic-substitution flavor") {
    const auto res = algorithm1_holomorphic(loop_example());
    const VerificationReport rep = verify_construction(res, quick_cfg());
    CHECK(rep.pass);
    CHECK(rep.containment_pass);
    CHECK(rep.extraction.match);
}

TEST_CASE("oversized scale fails containment") {
    ConstructOptions opts;
    opts.lambda = 10.0;
    const auto res = algorithm1(loop_example(), opts);
    const VerificationReport rep = verify_construction(res, quick_cfg());
    CHECK(!rep.pass);
    CHECK(!rep.containment_pass);
    CHECK(rep.extraction.match);  // the word itself is still the target
}

TEST_CASE("deliberately enlarged scale raises the extra-component flag") {
    // The zero set scales with lambda while the scan ball does not: blown-up
    // curve arcs cross the deep slices' ball farther apart than the seed
    // matching distance, so the scan reports them as unexplained.
    ConstructOptions opts;
    opts.lambda = 3.0;
    const auto res = algorithm1(loop_example(), opts);
    const VerificationReport rep = verify_construction(res, quick_cfg());
    CHECK(!rep.pass);
    CHECK(!rep.containment_pass);
    CHECK(rep.extra_component_flags > 0);
}

TEST_CASE("grid scan flags a planted component and stays quiet without one") {
    const auto res = algorithm1(loop_example());
    const StrandSystem& sys = *res.system;
    const VerifyConfig cfg = quick_cfg();
    const auto seeds = ring_seeds(sys, res.lambda, 16, 64);

    const SliceReport clean = slice_zeroes(res.f, 1.0, seeds, cfg);
    REQUIRE(clean.failures == 0);
    CHECK(grid_scan_extra(res.f, 1.0, clean.points, cfg).flagged == 0);

    // Plant a small sphere-section component around the origin.
    LaurentPoly extra(res.f.vars());
    const int nv = static_cast<int>(res.f.vars().size());
    auto mono = [&](const std::string& name, int e) {
        std::vector<int> exps(nv, 0);
        exps[res.f.var_index(name)] = e;
        return exps;
    };
    extra.add_term(mono("x", 2), Coeff(1.0));
    extra.add_term(mono("y", 2), Coeff(1.0));
    extra.add_term(mono("z", 2), Coeff(1.0));
    extra.add_term(mono("x", 0), Coeff(-0.01));
    extra.add_term(mono("z", 1), Coeff(0.0, 1.0));
    const LaurentPoly planted = res.f * extra;

    const SliceReport tracked = slice_zeroes(planted, 1.0, seeds, cfg);
    REQUIRE(tracked.failures == 0);
    const GridScanReport scan =
        grid_scan_extra(planted, 1.0, tracked.points, cfg);
    CHECK(scan.flagged > 0);
    bool near_plant = false;
    for (const auto& p : scan.extra_points)
        near_plant = near_plant ||
                     (std::abs(p.norm() - 0.1) < 2e-2 && std::abs(p.z) < 2e-2);
    CHECK(near_plant);
}

TEST_CASE("braid re-extraction reproduces the mixed example word") {
    const auto sys = loop_strand_system(loop_example());
    const ExtractionReport rep = reextract_braid(sys);
    CHECK(rep.match);
    CHECK(rep.detail.empty());
    REQUIRE(rep.intervals.size() == 5);

    // Letters r1^-1 r2 s1 r2 r1^-1: the middle interval carries the
    // positive pass-through crossing. Ring exchanges are involutions, so the
    // parsed word and the extraction both carry them with positive sign.
    CHECK(rep.intervals[2].kind == TokenKind::sigma);
    CHECK(rep.intervals[2].sign == 1);
    CHECK(rep.intervals[2].position == 1);
    const std::vector<int> positions{1, 2, 1, 2, 1};
    for (int k = 0; k < 5; ++k) {
        if (k == 2) continue;
        CHECK(rep.intervals[k].kind == TokenKind::rho);
        CHECK(rep.intervals[k].sign == 1);
        CHECK(rep.intervals[k].position == positions[k]);
    }

    const std::vector<double> times{0.793585, 1.856992, 3.141593, 4.426193,
                                    5.489600};
    for (int k = 0; k < 5; ++k)
        CHECK(std::abs(rep.intervals[k].time - times[k]) < 2e-3);
}

TEST_CASE("braid re-extraction handles single letters and classical words") {
    for (const char* text : {"r1", "r1^-1", "s1", "s1^-1"}) {
        const auto sys = loop_strand_system(parse_loop_word(text, 2));
        const ExtractionReport rep = reextract_braid(sys);
        INFO(text);
        CHECK(rep.match);
        REQUIRE(rep.intervals.size() == 1);
        CHECK(rep.intervals[0].position == 1);
    }

    const auto wh =
        classical_strand_system(parse_classical_word(kWhiteheadWord, 3));
    const ExtractionReport rep = reextract_braid(wh);
    CHECK(rep.match);
    REQUIRE(rep.intervals.size() == 5);
    const std::vector<int> signs{-1, 1, -1, 1, -1};
    const std::vector<int> positions{1, 2, 1, 2, 1};
    for (int k = 0; k < 5; ++k) {
        CHECK(rep.intervals[k].kind == TokenKind::sigma);
        CHECK(rep.intervals[k].sign == signs[k]);
        CHECK(rep.intervals[k].position == positions[k]);
    }
}

TEST_CASE("braid re-extraction agrees across a random corpus") {
    const auto words = random_loop_words(8, 4, 6, 1);
    for (std::size_t i = 0; i < words.size(); ++i) {
        INFO("word " << i);
        const auto sys = loop_strand_system(words[i]);
        const ExtractionReport rep = reextract_braid(sys);
        INFO(rep.detail);
        CHECK(rep.match);
    }
}

TEST_CASE("fibration twist rate matches the strand-times-twist product") {
    const auto two = algorithm2(parse_classical_word("s1", 2), 1);
    const FibrationReport f2 = fibration_check(two, 32, 0);
    CHECK(f2.pass);
    CHECK(!f2.skipped);
    CHECK(f2.expected == 2);
    CHECK(f2.max_rel_error <= 1e-6);
    CHECK(!f2.samples.empty());

    const auto three = algorithm2(parse_classical_word(kWhiteheadWord, 3), 1);
    const FibrationReport f3 = fibration_check(three, 32, 0);
    CHECK(f3.pass);
    CHECK(f3.expected == 3);
    CHECK(f3.max_rel_error <= 1e-6);

    const auto flat = algorithm2(parse_classical_word("s1", 2), 0);
    const FibrationReport f0 = fibration_check(flat, 8, 0);
    CHECK(f0.pass);
    CHECK(f0.skipped);
    CHECK(f0.expected == 0);
    CHECK(!f0.note.empty());

    const auto plain = algorithm0(parse_classical_word("s1", 2));
    CHECK_THROWS_AS(fibration_check(plain, 8, 0), std::invalid_argument);
}

TEST_CASE("full verification covers the non-spatial construction flavors") {
    const auto classical =
        verify_construction(algorithm0(parse_classical_word(kWhiteheadWord, 3)));
    CHECK(classical.pass);
    CHECK(classical.containment_pass);
    CHECK(classical.extraction.match);
    CHECK(classical.slices.empty());
    CHECK(!classical.fibration.has_value());

    const auto spun =
        verify_construction(algorithm2(parse_classical_word("s1", 2), 1));
    CHECK(spun.pass);
    REQUIRE(spun.fibration.has_value());
    CHECK(spun.fibration->pass);
    CHECK(spun.extraction.match);
}

TEST_CASE("full verification passes on satellite constructions") {
    const auto word = loop_example();
    VerifyConfig cfg = quick_cfg();
    cfg.cert_t_samples = 64;
    cfg.cert_ring_angles = 32;

    const auto trivial = satellite_builder(word, {trivial_fill(), trivial_fill()});
    const VerificationReport rep0 = verify_construction(trivial, cfg);
    CHECK(rep0.pass);
    CHECK(rep0.containment_pass);
    CHECK(rep0.extraction.match);
    REQUIRE(rep0.slices.size() == 3);

    const auto filled = satellite_builder(
        word, {parse_classical_word("s1 s1 s1", 2), trivial_fill()});
    const VerificationReport rep1 = verify_construction(filled, cfg);
    CHECK(rep1.pass);
    CHECK(rep1.containment_pass);
    CHECK(rep1.extraction.match);
    REQUIRE(rep1.slices.size() == 3);
}
