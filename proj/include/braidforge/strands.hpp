#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "braidforge/braid.hpp"
#include "braidforge/trig.hpp"
#include "braidforge/util.hpp"

namespace braidforge {

struct StrandRef {
    int comp = 0;    // component index (0-based)
    int strand = 0;  // strand index within component (0-based)

    bool operator==(const StrandRef&) const = default;
};

enum class EventKind { target_sigma, target_rho, spurious };

struct CrossingEvent {
    double time = 0.0;  // t* in [0, 2*pi)
    int interval = 0;   // k with t* in [2*pi*k/l, 2*pi*(k+1)/l)
    StrandRef a, b;     // a holds the lower x-rank just before the event
    EventKind kind = EventKind::spurious;
    int sign = 0;            // token sign for target events
    int token_index = 0;     // generator index i for target events
    StrandRef passer;        // smaller-radius strand (target sigma only)

    bool involves(const StrandRef& s) const { return a == s || b == s; }
};

enum class SystemKind { classical, loop };

struct ComponentCurves {
    TrigPoly F, G, H, R;
};

struct StrandSystem {
    SystemKind kind = SystemKind::loop;
    LoopBraidWord word;  // the target word (classical words embedded as sigma-only)
    ComponentDecomposition decomposition;
    std::vector<ComponentCurves> comps;
    std::vector<CrossingEvent> events;
    double epsilon = 1.0;            // applied scaling for the radii
    double epsilon_threshold = 1.0;  // admissible bound the scaling stays below

    int component_count() const { return static_cast<int>(comps.size()); }
    int strands_of(int c) const { return decomposition.strand_count(c); }
    // Reparametrized strand angle (t + 2*pi*j) / s_C, j 0-based.
    double strand_angle(int c, int j, double t) const;
    double x_of(int c, int j, double t) const;
    double y_of(int c, int j, double t) const;
    double z_of(int c, int j, double t) const;
    double radius_of(int c, int j, double t) const;  // epsilon-scaled
};

struct StrandOptions {
    bool lane_flip = false;     // mirror the left-to-right lane numbering
    std::uint64_t seed = 0;     // jitter determinism
    int dense_samples = 8192;   // crossing-detection sampling
    double bisect_tol = 1e-10;  // crossing-time refinement
    int grid = 4096;            // invariant/positivity verification grid
    double coeff_limit = 1e8;   // retry when interpolants exceed this
    int max_attempts = 3;       // jitter retries
};

// Per-strand interpolation nodes (angle, value) in the component's parameter.
struct NodeList {
    std::vector<double> angles;
    std::vector<double> values;
};

// x-lane of diagram position p among s strands; position 1 maps to the
// largest lane. lane_flip mirrors the direction.
double lane_value(int p, int s, bool flip);

// Step 1 data: each strand contributes one node per interval sample time,
// holding its diagram lane. jitter entries (one per strand position, may be
// empty) displace the lanes for retry attempts.
std::vector<NodeList> extract_x_data(const LoopBraidWord& word,
                                     const ComponentDecomposition& decomp,
                                     bool lane_flip = false,
                                     const std::vector<double>& lane_jitter = {});

std::vector<TrigPoly> build_F(const std::vector<NodeList>& nodes);

// All transversal intersections of the strand x-graphs, sorted by time and
// classified against the target word. Throws on tangential contact and on
// interval/transposition inconsistencies.
std::vector<CrossingEvent> detect_crossings(const LoopBraidWord& word,
                                            const ComponentDecomposition& decomp,
                                            const std::vector<TrigPoly>& F,
                                            const StrandOptions& opts = {});

// Step 2 data: per-strand y nodes at event angles. y_jitter (per strand
// start-position, may be empty) displaces the per-interval levels.
std::vector<NodeList> assign_y_values(const LoopBraidWord& word,
                                      const ComponentDecomposition& decomp,
                                      const std::vector<CrossingEvent>& events,
                                      const std::vector<double>& y_jitter = {});

std::vector<TrigPoly> build_G(const std::vector<NodeList>& nodes);

// Step 3: Hermite z-data at sigma events; components without sigma events get
// the zero polynomial.
std::vector<TrigPoly> build_H(const ComponentDecomposition& decomp,
                              const std::vector<CrossingEvent>& events);

// Step 4: radius interpolation (1 for the passing strand, 2 for the other)
// plus the shared positivity shift. Components without sigma events get 1.
std::vector<TrigPoly> build_R(const ComponentDecomposition& decomp,
                              const std::vector<CrossingEvent>& events,
                              int grid = 4096);

// Minimum over clearance constraints of distance / (radius sum); the radius
// scaling must stay below this. Uses the system's radii as stored (call with
// epsilon = 1 to obtain the admissible bound for unscaled radii).
double epsilon_threshold(const StrandSystem& sys, const StrandOptions& opts = {});

// Full pipelines.
StrandSystem loop_strand_system(const LoopBraidWord& word,
                                const StrandOptions& opts = {});
StrandSystem classical_strand_system(const ClassicalBraidWord& word,
                                     const StrandOptions& opts = {});

// Grid check of the geometric invariants (ring disjointness away from sigma
// events, strict radius nesting at them, positive radii). Returns diagnostics,
// empty when everything holds.
std::vector<std::string> check_system_invariants(const StrandSystem& sys,
                                                 const StrandOptions& opts = {});

}  // namespace braidforge
