#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "braidforge/construct.hpp"
#include "braidforge/poly.hpp"
#include "braidforge/strands.hpp"
#include "braidforge/util.hpp"

namespace braidforge {

// Numeric certification knobs. The defaults keep the tracking grids small
// enough for scale selection inside construction runs; reports for external
// consumption may raise the sample counts.
struct VerifyConfig {
    int t_samples = 48;       // circle samples per tracked radius
    int ring_angles = 8;      // seeds per ring at each circle sample
    int cert_t_samples = 256;   // circle samples for the recorded slices
    int cert_ring_angles = 64;  // seeds per ring for the recorded slices
    double r_floor = 0.5;     // deepest circle radius probed
    double delta_target = 0.05;  // retraction depth sought; the descent stops
                                 // here, and an earlier loss of ring health
                                 // yields a smaller (still valid) depth
    double r_step = 1e-2;     // continuation step, halved adaptively
    int bisect_iters = 20;
    double margin_floor = 1e-6;     // minimum singular value of the slice map
    double disjoint_floor = 1e-6;   // cross-ring separation during tracking
    double newton_tol = 1e-12;
    int newton_max_iters = 50;
    double lambda_cap = 1.0;
    double safety = 0.85;  // fraction of the admissible spatial allowance
    double residual_ceiling = 1e-8;
    int scan_grid = 32;
    double scan_threshold = 5e-2;   // |f| cutoff before refining a scan point
    double scan_match_tol = 5e-2;   // distance identifying a tracked zero
    int threads = 0;  // refinement/scan worker count, 0 = hardware default
};

// One Newton seed on the slice |v| = 1: a known zero of f at v = e^{it}.
// Seeds sharing a group belong to the same closed curve; disjointness is
// measured across groups. When a ring center is attached, the regularity
// margin augments the two gradient rows with the angular coordinate around
// (cx, cy), turning the slice map into a square system.
struct SliceSeed {
    double t = 0.0;
    int group = 0;
    Vec3 point;
    double cx = 0.0, cy = 0.0;
    bool has_center = false;
};

struct SlicePoint {
    double t = 0.0;
    int group = 0;
    Vec3 point;
    double residual = 0.0;
    // Min singular value of the spatial derivative: 3x3 with the ring-angle
    // row when the seed carries a center, otherwise the bare 2x3 rows.
    double margin = 0.0;
    bool converged = false;
    double cx = 0.0, cy = 0.0;
    bool has_center = false;
};

struct SliceReport {
    double r = 1.0;
    std::vector<SlicePoint> points;
    int failures = 0;
    double max_residual = 0.0;
    double min_margin = 0.0;
    // Minimum distance between tracked points of different groups at the same
    // circle sample; infinity when only one group exists.
    double min_cross_group_distance = 0.0;
    double max_norm = 0.0;  // spatial extent M(., r) estimate
};

// Newton refinement (least-squares step on the two real components of f over
// x, y, z) of every seed at circle radius r. f's vars must contain x, y, z
// and the circle pair v/vbar (vbar optional).
SliceReport slice_zeroes(const LaurentPoly& f, double r,
                         const std::vector<SliceSeed>& seeds,
                         const VerifyConfig& cfg = {});

// Ring-parametrization seeds of a strand system, scaled by lambda.
std::vector<SliceSeed> ring_seeds(const StrandSystem& sys, double lambda,
                                  int t_samples, int ring_angles);

struct LambdaSelection {
    double lambda = 1.0;
    double delta = 0.0;
    double spatial_extent = 0.0;  // max zero-set norm at circle radius 1 - delta
    double allowance = 0.0;       // 0.9 * sqrt(delta * (2 - delta))
    bool pass = false;
    std::string note;
};

// Scale selection: track the slice zeros from radius 1 downward until the
// regularity margin or the cross-ring separation degrades, bisect the failure
// radius, and size the scale so the spatial extent at the retracted radius
// stays inside the sphere's cross-section. The input must be the unscaled
// (lambda = 1) polynomial with its seeds. The depth only needs to be
// positive; shallow strips are valid certificates. When a separate dense
// seed grid is supplied, the chosen depth is re-tracked on it and halved
// until the dense walk stays healthy, since coarse grids overlook narrow
// trouble spots in t.
LambdaSelection select_lambda(const LaurentPoly& f,
                              const std::vector<SliceSeed>& seeds,
                              const VerifyConfig& cfg = {});
LambdaSelection select_lambda(const LaurentPoly& f,
                              const std::vector<SliceSeed>& seeds,
                              const std::vector<SliceSeed>& dense_seeds,
                              const VerifyConfig& cfg = {});

// Coarse spatial grid scan at circle radius r: refine every low-|f| grid
// point and flag converged zeros that match no tracked point.
struct GridScanReport {
    int flagged = 0;
    std::vector<Vec3> extra_points;
};
GridScanReport grid_scan_extra(const LaurentPoly& f, double r,
                               const std::vector<SlicePoint>& tracked,
                               const VerifyConfig& cfg = {});

// Re-extraction of the braid word from the strand curves, one entry per
// letter interval.
struct IntervalExtraction {
    int interval = 0;
    int position = 0;  // generator index: the lower of the two swapped ranks
    TokenKind kind = TokenKind::sigma;
    int sign = 0;
    double time = 0.0;
};
struct ExtractionReport {
    std::vector<IntervalExtraction> intervals;
    bool match = false;
    std::string detail;  // first mismatch, empty when match
};
ExtractionReport reextract_braid(const StrandSystem& sys,
                                 const StrandOptions& opts = {});

// Twist-rate samples of a spun construction: at every critical point of g in
// u, the argument of g advances around the second circle at rate s * n.
struct FibrationSample {
    double phi = 0.0;
    double chi = 0.0;
    std::complex<double> u;
    double value = 0.0;
};
struct FibrationReport {
    int expected = 0;  // s * n
    double max_rel_error = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
    std::vector<FibrationSample> samples;
};
FibrationReport fibration_check(const ConstructionResult& res, int sample_count,
                                std::uint64_t seed = 0);

// Roots of a dense complex polynomial, coefficients ascending; companion
// matrix eigenvalues. Leading zero coefficients are trimmed.
std::vector<std::complex<double>> poly_roots(
    const std::vector<std::complex<double>>& coeffs);

struct VerificationReport {
    LambdaSelection selection;
    // Per tracked radius: (r, max residual, min margin, min cross-ring gap).
    std::vector<SliceReport> slices;
    ExtractionReport extraction;
    std::optional<FibrationReport> fibration;
    int extra_component_flags = 0;
    bool containment_pass = false;
    bool pass = false;
    std::vector<std::string> notes;
};

// Full certification of a construction bundle: residuals and regularity
// margins at radii 1, 1 - delta/2 and 1 - delta, containment of the spatial
// extent, word re-extraction, and the twist-rate check for spun results.
VerificationReport verify_construction(const ConstructionResult& res,
                                       const VerifyConfig& cfg = {});

}  // namespace braidforge
