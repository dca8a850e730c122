#pragma once

#include <optional>
#include <string>
#include <vector>

#include "braidforge/braid.hpp"
#include "braidforge/poly.hpp"
#include "braidforge/strands.hpp"
#include "braidforge/trig.hpp"
#include "braidforge/util.hpp"

namespace braidforge {

// Degree estimate derived from the interpolation node counts of the strand
// curves. `contributions` holds one summand per closure component (for the
// satellite builder: the per-component product already formed); `bound` is the
// final integer. All arithmetic is exact.
struct BoundReport {
    std::string flavor;  // classical | loop | loop-holomorphic | spin | satellite
    int total_strands = 0;
    int word_length = 0;
    int spin = 0;  // twist count n, spin flavor only
    std::vector<int> component_strands;
    // Number of exchange-crossing incidences per component, counted with
    // multiplicity (a crossing inside one component counts twice). Determines
    // the node counts of the z and radius curves.
    std::vector<int> sigma_incidence;
    std::vector<long long> contributions;
    long long bound = 0;
};

BoundReport classical_degree_bound(const ClassicalBraidWord& word);
BoundReport loop_degree_bound(const LoopBraidWord& word);
// Variant for the numerator form that is holomorphic in the circle variable;
// adds the cleared-denominator power to the estimate.
BoundReport loop_holomorphic_degree_bound(const LoopBraidWord& word);
BoundReport spin_degree_bound(const ClassicalBraidWord& word, int n);
BoundReport satellite_degree_bound(const LoopBraidWord& word,
                                   const std::vector<ClassicalBraidWord>& fills);
// Closed form for words whose closure is a single component; agrees with
// loop_degree_bound whenever the interpolation term dominates the strand
// count.
long long one_component_degree_bound(int strands, int length);

// One building block of the satellite construction: the filling braid placed
// inside a component's tube, together with its vanishing polynomial over
// x1,x2,x3. A 1-strand filling with no letters is the trivial tube filling.
struct SatelliteFactor {
    ClassicalBraidWord word;
    LaurentPoly f3;  // vars x1,x2,x3; zero set is the filling's closed braid
    int degree = 0;  // total degree of f3, also the radius power in the factor
    // Present for non-trivial fillings: the polynomial over u, v, vbar the
    // filling was pulled back from (vbar pairs with v off the unit circle).
    std::optional<LaurentPoly> inner_f;
    double inner_lambda = 1.0;
};

struct ConstructionResult {
    std::string algorithm;  // classical | loop | loop-holomorphic | spin | torus | satellite
    // Product form over circle variables: negative exponents allowed on v (and
    // w for the doubly periodic builders).
    LaurentPoly g;
    // Polynomial form. For classical/loop/satellite: conjugate variables
    // folded in (vbar = conj v on the unit circle). For spin/torus: the
    // numerator after clearing negative circle powers; the cleared powers are
    // recorded below so f * v^-pv * w^-pw reproduces g on the torus.
    LaurentPoly f;
    int f_denominator_v_power = 0;
    int f_denominator_w_power = 0;
    // Numerator form that is holomorphic in v, with its cleared power.
    std::optional<LaurentPoly> f_tilde;
    int f_tilde_denominator_power = 0;
    std::optional<StrandSystem> system;
    std::vector<SatelliteFactor> satellite_factors;
    double lambda = 1.0;
    DegreeReport degree;  // of f (of the numerator for loop-holomorphic)
    std::optional<BoundReport> bound;
};

struct ConstructOptions {
    // Engaged: explicit spatial scale. Empty: automatic selection via the
    // certification module (classical constructions fall back to 1.0, where
    // the scale only affects the embedding radius, not the expansion).
    std::optional<double> lambda;
    // Upper cap on the scale used inside satellite building blocks when
    // pulling a filling braid into the unit-circle tube; shrunk automatically
    // until the filling's zero set fits inside the tube fibre.
    double satellite_lambda = 0.5;
    double prune_rel_tol = 1e-14;
    StrandOptions strand;
};

// Classical braid as the vanishing set of a u-monic product, one linear
// factor per strand: deg_u f equals the strand count.
ConstructionResult algorithm0(const ClassicalBraidWord& word,
                              const ConstructOptions& opts = {});

// Loop braid as a product of ring factors
//   (x/l - F)^2 + (y/l - G)^2 - (eR)^2 + i (z/l - H)
// per strand, expanded over x, y, z and the circle variable.
ConstructionResult algorithm1(const LoopBraidWord& word,
                              const ConstructOptions& opts = {});

// Same product, reported through the numerator substitution that keeps only
// nonnegative circle powers; the degree report and bound describe f_tilde.
ConstructionResult algorithm1_holomorphic(const LoopBraidWord& word,
                                          const ConstructOptions& opts = {});

// Spun classical braid: each strand factor carries a twist power w^n. The
// result is holomorphic in u, v, w after numerator extraction.
ConstructionResult algorithm2(const ClassicalBraidWord& word, int n,
                              const ConstructOptions& opts = {});

// Doubly periodic parametrization input for the generic torus builder. s_phi
// and s_chi are the sheet counts in the two circle directions; the component
// covers the (j, k) grid of argument shifts.
struct TorusComponentInput {
    TorusTrigPoly F, G;
    int s_phi = 1;
    int s_chi = 1;
};

// Surface braid from explicit torus parametrizations. Strand sheets must be
// pairwise disjoint on a 128 x 128 sample grid.
ConstructionResult torus_builder(const std::vector<TorusComponentInput>& comps,
                                 double prune_rel_tol = 1e-14);

// Loop braid with each component's tube filled by a classical braid closure.
// `fills` must list one word per closure component, in component order;
// 1-strand empty words are trivial fillings.
ConstructionResult satellite_builder(const LoopBraidWord& word,
                                     const std::vector<ClassicalBraidWord>& fills,
                                     const ConstructOptions& opts = {});

// Points on the satellite construction's vanishing set for strand j of
// component c: the filling braid's closed strands, scaled into the tube.
// t_samples times around the main circle, curve_samples around the filling.
std::vector<Vec3> satellite_strand_points(const ConstructionResult& res, int c,
                                          int j, int t_samples,
                                          int curve_samples);

}  // namespace braidforge
