#include "braidforge/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace braidforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int worker_count(const VerifyConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static chunking over [0, n); fn(i) must only touch slot i of its outputs,
// so the merged result is identical for every worker count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const std::size_t nthreads =
        std::min<std::size_t>(std::max(threads, 1), n);
    if (nthreads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) {
        futs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += nthreads) fn(i);
        }));
    }
    for (auto& f : futs) f.get();
}

// Dense term list over x, y, z for fast repeated evaluation at real points.
// Power tables are filled once per point and shared by the value and the
// three derivatives of a slice.
struct FlatPoly {
    std::vector<std::array<int, 3>> exps;
    std::vector<std::complex<double>> coeffs;

    std::complex<double> eval(const std::vector<double>& px,
                              const std::vector<double>& py,
                              const std::vector<double>& pz) const {
        NeumaierComplexSum acc;
        for (std::size_t i = 0; i < exps.size(); ++i)
            acc.add(coeffs[i] * (px[exps[i][0]] * py[exps[i][1]] * pz[exps[i][2]]));
        return acc.value();
    }
};

// One circle sample of f with the phase folded in: v -> r e^{it} and
// vbar -> r e^{-it} leave a polynomial over x, y, z and the radius r.
LaurentPoly fold_circle(const LaurentPoly& p, double t) {
    const int ix = p.var_index("x");
    const int iy = p.var_index("y");
    const int iz = p.var_index("z");
    const int iv = p.var_index("v");
    const int ivb = p.var_index("vbar");
    if (p.var_index("u") >= 0 || p.var_index("w") >= 0)
        throw std::invalid_argument(
            "slice tracking expects a spatial polynomial over x, y, z and the "
            "circle pair");
    LaurentPoly out({"x", "y", "z", "r"});
    for (const auto& [e, c] : p.terms()) {
        const int a = iv >= 0 ? e[iv] : 0;
        const int b = ivb >= 0 ? e[ivb] : 0;
        if (a < 0 || b < 0)
            throw std::invalid_argument(
                "slice tracking requires the folded polynomial form");
        const std::vector<int> oe = {ix >= 0 ? e[ix] : 0, iy >= 0 ? e[iy] : 0,
                                     iz >= 0 ? e[iz] : 0, a + b};
        out.add_term(oe, c * std::polar(1.0, (a - b) * t));
    }
    return out;
}

struct FoldedSlice {
    double t = 0.0;
    LaurentPoly F, Fx, Fy, Fz;  // over x, y, z, r
};

FoldedSlice make_folded(const LaurentPoly& f, const LaurentPoly& fx,
                        const LaurentPoly& fy, const LaurentPoly& fz, double t) {
    return {t, fold_circle(f, t), fold_circle(fx, t), fold_circle(fy, t),
            fold_circle(fz, t)};
}

// A folded slice with the radius substituted: four flat polynomials over
// x, y, z plus shared power tables sized to the joint degree.
struct EvalSlice {
    FlatPoly F, Fx, Fy, Fz;
    std::array<int, 3> max_exp{0, 0, 0};
    std::vector<double> px, py, pz;

    void prime(double x, double y, double z) {
        fill(px, max_exp[0], x);
        fill(py, max_exp[1], y);
        fill(pz, max_exp[2], z);
    }

  private:
    static void fill(std::vector<double>& p, int deg, double v) {
        p.resize(static_cast<std::size_t>(deg) + 1);
        p[0] = 1.0;
        for (int k = 1; k <= deg; ++k) p[k] = p[k - 1] * v;
    }
};

FlatPoly to_flat(const LaurentPoly& p, std::array<int, 3>& max_exp) {
    const int ix = p.var_index("x");
    const int iy = p.var_index("y");
    const int iz = p.var_index("z");
    FlatPoly out;
    out.exps.reserve(p.term_count());
    out.coeffs.reserve(p.term_count());
    for (const auto& [e, c] : p.terms()) {
        std::array<int, 3> oe{ix >= 0 ? e[ix] : 0, iy >= 0 ? e[iy] : 0,
                              iz >= 0 ? e[iz] : 0};
        for (int d = 0; d < 3; ++d) max_exp[d] = std::max(max_exp[d], oe[d]);
        out.exps.push_back(oe);
        out.coeffs.push_back(c);
    }
    return out;
}

EvalSlice at_radius(const FoldedSlice& fs, double r) {
    auto collapse = [&](const LaurentPoly& p) {
        return p.var_index("r") >= 0 ? substitute(p, "r", r) : p;
    };
    EvalSlice s;
    s.F = to_flat(collapse(fs.F), s.max_exp);
    s.Fx = to_flat(collapse(fs.Fx), s.max_exp);
    s.Fy = to_flat(collapse(fs.Fy), s.max_exp);
    s.Fz = to_flat(collapse(fs.Fz), s.max_exp);
    return s;
}

// Min singular value of the slice map's spatial derivative. With a ring
// center the two gradient rows gain the gradient of the angular coordinate
// arg((x + iy) - (cx + icy)), the square system whose invertibility carries
// the tracked point through the implicit function theorem.
double slice_margin(const std::complex<double>& gx,
                    const std::complex<double>& gy,
                    const std::complex<double>& gz, const Vec3& p,
                    const SliceSeed& seed) {
    if (seed.has_center) {
        const double wx = p.x - seed.cx;
        const double wy = p.y - seed.cy;
        const double d2 = wx * wx + wy * wy;
        if (d2 < 1e-30) return 0.0;
        Eigen::Matrix3d J;
        J << gx.real(), gy.real(), gz.real(),
             gx.imag(), gy.imag(), gz.imag(),
             -wy / d2, wx / d2, 0.0;
        return J.jacobiSvd().singularValues().minCoeff();
    }
    Eigen::MatrixXd J(2, 3);
    J << gx.real(), gy.real(), gz.real(), gx.imag(), gy.imag(), gz.imag();
    return J.jacobiSvd().singularValues().minCoeff();
}

// Damped least-squares Newton step on the two real components of f over
// three spatial unknowns.
SlicePoint refine_seed(EvalSlice& slice, const SliceSeed& seed,
                       const VerifyConfig& cfg) {
    SlicePoint out;
    out.t = seed.t;
    out.group = seed.group;
    out.cx = seed.cx;
    out.cy = seed.cy;
    out.has_center = seed.has_center;
    Vec3 p = seed.point;
    double res = kInf;
    double margin = 0.0;
    for (int iter = 0; iter < cfg.newton_max_iters; ++iter) {
        slice.prime(p.x, p.y, p.z);
        const std::complex<double> fv = slice.F.eval(slice.px, slice.py, slice.pz);
        const std::complex<double> gx = slice.Fx.eval(slice.px, slice.py, slice.pz);
        const std::complex<double> gy = slice.Fy.eval(slice.px, slice.py, slice.pz);
        const std::complex<double> gz = slice.Fz.eval(slice.px, slice.py, slice.pz);
        res = std::abs(fv);
        margin = slice_margin(gx, gy, gz, p, seed);
        Eigen::MatrixXd J(2, 3);
        J << gx.real(), gy.real(), gz.real(), gx.imag(), gy.imag(), gz.imag();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (res < cfg.newton_tol) break;
        Eigen::Vector2d rhs(-fv.real(), -fv.imag());
        Eigen::Vector3d step = svd.solve(rhs);
        if (!step.allFinite()) break;
        double scale = 1.0;
        Vec3 cand = p;
        double cres = res;
        bool improved = false;
        for (int halve = 0; halve < 10; ++halve) {
            cand = {p.x + scale * step(0), p.y + scale * step(1),
                    p.z + scale * step(2)};
            slice.prime(cand.x, cand.y, cand.z);
            cres = std::abs(slice.F.eval(slice.px, slice.py, slice.pz));
            if (cres < res) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;
        p = cand;
        res = cres;
        if (step.norm() * scale < 1e-16 * (1.0 + p.norm())) {
            // Stagnant update; the next pass only refreshes the margin.
        }
    }
    out.point = p;
    out.residual = res;
    out.margin = margin;
    // Stalled iterations at the evaluation noise floor still count as
    // converged as long as they reach the health ceiling for slices.
    out.converged = res <= std::max(cfg.newton_tol, cfg.residual_ceiling);
    return out;
}

struct SeedBuckets {
    std::vector<double> ts;                        // distinct times, sorted
    std::vector<std::vector<SliceSeed>> by_time;   // parallel to ts
};

SeedBuckets bucket_seeds(const std::vector<SliceSeed>& seeds) {
    SeedBuckets b;
    std::map<double, std::vector<SliceSeed>> m;
    for (const auto& s : seeds) m[s.t].push_back(s);
    for (auto& [t, list] : m) {
        b.ts.push_back(t);
        b.by_time.push_back(std::move(list));
    }
    return b;
}

std::vector<FoldedSlice> fold_all(const LaurentPoly& f,
                                  const std::vector<double>& ts,
                                  const VerifyConfig& cfg) {
    const LaurentPoly fx = f.derivative("x");
    const LaurentPoly fy = f.derivative("y");
    const LaurentPoly fz = f.derivative("z");
    std::vector<FoldedSlice> out(ts.size());
    parallel_for(ts.size(), worker_count(cfg), [&](std::size_t i) {
        out[i] = make_folded(f, fx, fy, fz, ts[i]);
    });
    return out;
}

SliceReport track_radius(const std::vector<FoldedSlice>& folded,
                         const std::vector<std::vector<SliceSeed>>& buckets,
                         double r, const VerifyConfig& cfg) {
    // One independent work item per circle sample; partial reports merge in
    // sample order, so the result is identical for every worker count.
    std::vector<SliceReport> parts(folded.size());
    parallel_for(folded.size(), worker_count(cfg), [&](std::size_t i) {
        SliceReport& part = parts[i];
        part.min_margin = kInf;
        part.min_cross_group_distance = kInf;
        EvalSlice slice = at_radius(folded[i], r);
        for (const auto& seed : buckets[i]) {
            SlicePoint sp = refine_seed(slice, seed, cfg);
            if (sp.converged) {
                part.max_residual = std::max(part.max_residual, sp.residual);
                part.min_margin = std::min(part.min_margin, sp.margin);
                part.max_norm = std::max(part.max_norm, sp.point.norm());
            } else {
                ++part.failures;
            }
            part.points.push_back(sp);
        }
        for (std::size_t a = 0; a < part.points.size(); ++a) {
            if (!part.points[a].converged) continue;
            for (std::size_t b = a + 1; b < part.points.size(); ++b) {
                if (!part.points[b].converged) continue;
                if (part.points[a].group == part.points[b].group) continue;
                const double d =
                    (part.points[a].point - part.points[b].point).norm();
                part.min_cross_group_distance =
                    std::min(part.min_cross_group_distance, d);
            }
        }
    });
    SliceReport rep;
    rep.r = r;
    rep.min_margin = kInf;
    rep.min_cross_group_distance = kInf;
    for (auto& part : parts) {
        rep.failures += part.failures;
        rep.max_residual = std::max(rep.max_residual, part.max_residual);
        rep.min_margin = std::min(rep.min_margin, part.min_margin);
        rep.max_norm = std::max(rep.max_norm, part.max_norm);
        rep.min_cross_group_distance = std::min(rep.min_cross_group_distance,
                                                part.min_cross_group_distance);
        rep.points.insert(rep.points.end(), part.points.begin(),
                          part.points.end());
    }
    if (rep.min_margin == kInf) rep.min_margin = 0.0;
    return rep;
}

bool slice_healthy(const SliceReport& rep, const VerifyConfig& cfg) {
    // The separation floor is measured relative to the spatial extent of the
    // slice so that rescaling the construction rescales the gate with it.
    const double scale = std::max(rep.max_norm, 1e-30);
    return !rep.points.empty() && rep.failures == 0 &&
           rep.max_residual <= cfg.residual_ceiling &&
           rep.min_margin > cfg.margin_floor &&
           rep.min_cross_group_distance > cfg.disjoint_floor * scale;
}

std::vector<std::vector<SliceSeed>> reseed(const SeedBuckets& layout,
                                           const SliceReport& rep) {
    std::vector<std::vector<SliceSeed>> out(layout.ts.size());
    std::map<double, std::size_t> index;
    for (std::size_t i = 0; i < layout.ts.size(); ++i) index[layout.ts[i]] = i;
    for (const auto& p : rep.points)
        out[index.at(p.t)].push_back(
            {p.t, p.group, p.point, p.cx, p.cy, p.has_center});
    return out;
}

// Continuation from the unit radius downward; the adaptive step halving
// doubles as the bisection of the failure radius. The candidate depth found
// on the coarse grid is accepted only after the dense grid tracks the whole
// strip cleanly; thin near-contact regions in t are easy to miss at low
// sample counts, so the depth halves until the dense walk agrees.
LambdaSelection run_selection(const LaurentPoly& f,
                              const std::vector<SliceSeed>& seeds,
                              const std::vector<SliceSeed>& dense_seeds,
                              const VerifyConfig& cfg) {
    LambdaSelection sel;
    SeedBuckets layout = bucket_seeds(seeds);
    if (layout.ts.empty()) {
        sel.note = "no seeds supplied";
        return sel;
    }
    const std::vector<FoldedSlice> folded = fold_all(f, layout.ts, cfg);
    SliceReport base = track_radius(folded, layout.by_time, 1.0, cfg);
    if (!slice_healthy(base, cfg)) {
        sel.note = "zero tracking failed at the unit radius";
        return sel;
    }
    std::vector<SliceReport> chain;
    chain.push_back(base);
    // The retraction only needs a strip of certified depth delta_target; the
    // descent stops once that depth (plus the safety back-off) is reached.
    // When the rings lose health earlier, the adaptive halving brackets the
    // failure radius and the certificate uses a backed-off fraction of the
    // deepest healthy depth, since the strip may be arbitrarily thin.
    const double kBackoff = 0.8;
    const double stop_depth =
        std::min(cfg.delta_target / kBackoff, 1.0 - cfg.r_floor);
    double r_good = 1.0;
    double step = cfg.r_step;
    const double step_floor = 1e-4;
    int probes = 0;
    while (1.0 - r_good < stop_depth - 1e-12 && step >= step_floor &&
           probes < 400) {
        const double r_try = std::max(1.0 - stop_depth, r_good - step);
        SliceReport rep =
            track_radius(folded, reseed(layout, chain.back()), r_try, cfg);
        ++probes;
        if (slice_healthy(rep, cfg)) {
            r_good = r_try;
            chain.push_back(std::move(rep));
            step = std::min(cfg.r_step, step * 2.0);
        } else {
            step *= 0.5;
        }
    }
    const double raw_depth = 1.0 - r_good;
    sel.delta = std::min(cfg.delta_target, kBackoff * raw_depth);
    if (!(sel.delta > 0.0)) {
        sel.note = "no healthy depth below the unit radius";
        return sel;
    }
    if (raw_depth < stop_depth - 1e-9)
        sel.note = "ring health lost at depth " + std::to_string(raw_depth);

    sel.spatial_extent = chain.back().max_norm;
    if (!dense_seeds.empty()) {
        SeedBuckets dlayout = bucket_seeds(dense_seeds);
        const std::vector<FoldedSlice> dfolded = fold_all(f, dlayout.ts, cfg);
        SliceReport dbase = track_radius(dfolded, dlayout.by_time, 1.0, cfg);
        if (!slice_healthy(dbase, cfg)) {
            sel.pass = false;
            sel.note = "dense tracking failed at the unit radius";
            return sel;
        }
        const auto walk = [&](double depth, SliceReport* deepest) -> bool {
            SliceReport cur = dbase;
            double r = 1.0;
            for (double target : {1.0 - depth / 2.0, 1.0 - depth}) {
                while (r > target + 1e-12) {
                    const double r_next = std::max(target, r - cfg.r_step);
                    SliceReport next =
                        track_radius(dfolded, reseed(dlayout, cur), r_next, cfg);
                    if (!slice_healthy(next, cfg)) return false;
                    cur = std::move(next);
                    r = r_next;
                }
            }
            if (deepest) *deepest = std::move(cur);
            return true;
        };
        bool validated = false;
        double depth = sel.delta;
        for (int round = 0; round < 12 && depth > 1e-7; ++round) {
            SliceReport deepest;
            if (walk(depth, &deepest)) {
                if (depth < sel.delta - 1e-12)
                    sel.note = "dense tracking reduced the depth to " +
                               std::to_string(depth);
                sel.delta = depth;
                sel.spatial_extent = deepest.max_norm;
                validated = true;
                break;
            }
            depth *= 0.5;
        }
        if (!validated) {
            sel.pass = false;
            sel.note = "no strip depth survived dense tracking";
            return sel;
        }
    }
    sel.allowance = 0.9 * std::sqrt(sel.delta * (2.0 - sel.delta));
    if (!(sel.spatial_extent > 0.0)) {
        sel.note = "degenerate spatial extent";
        return sel;
    }
    sel.lambda = std::min(cfg.lambda_cap, cfg.safety *
                              std::sqrt(sel.delta * (2.0 - sel.delta)) /
                              sel.spatial_extent);
    if (!(sel.lambda > 0.0) || !std::isfinite(sel.lambda)) {
        sel.note = "scale computation failed";
        return sel;
    }
    sel.pass = true;
    if (sel.note.empty()) sel.note = "ok";
    return sel;
}

// Continuation from the unit radius to each target radius in descending
// order, stepping at most cfg.r_step and landing exactly on the targets; one
// report per target. Stops early when a step loses health, recording the
// failing report so the caller sees the defect.
std::vector<SliceReport> track_to_radii(const LaurentPoly& f,
                                        const std::vector<SliceSeed>& seeds,
                                        const std::vector<double>& targets,
                                        const VerifyConfig& cfg) {
    std::vector<SliceReport> out;
    SeedBuckets layout = bucket_seeds(seeds);
    if (layout.ts.empty()) return out;
    const std::vector<FoldedSlice> folded = fold_all(f, layout.ts, cfg);
    SliceReport cur = track_radius(folded, layout.by_time, 1.0, cfg);
    double r = 1.0;
    for (double target : targets) {
        if (target > r + 1e-12) continue;
        bool healthy = slice_healthy(cur, cfg);
        while (healthy && r > target + 1e-12) {
            const int left =
                static_cast<int>(std::ceil((r - target) / cfg.r_step - 1e-9));
            const double r_next = std::max(left, 1) > 1
                                      ? r - (r - target) / left
                                      : target;
            SliceReport next =
                track_radius(folded, reseed(layout, cur), r_next, cfg);
            healthy = slice_healthy(next, cfg);
            cur = std::move(next);
            r = r_next;
        }
        out.push_back(cur);
        if (!healthy) break;
    }
    return out;
}

std::string token_text(TokenKind kind, int index, int sign) {
    std::string s = (kind == TokenKind::sigma ? "s" : "r") + std::to_string(index);
    if (sign < 0) s += "^-1";
    return s;
}

}  // namespace

SliceReport slice_zeroes(const LaurentPoly& f, double r,
                         const std::vector<SliceSeed>& seeds,
                         const VerifyConfig& cfg) {
    SeedBuckets layout = bucket_seeds(seeds);
    const std::vector<FoldedSlice> folded = fold_all(f, layout.ts, cfg);
    return track_radius(folded, layout.by_time, r, cfg);
}

std::vector<SliceSeed> ring_seeds(const StrandSystem& sys, double lambda,
                                  int t_samples, int ring_angles) {
    std::vector<SliceSeed> seeds;
    int group = 0;
    for (int c = 0; c < sys.component_count(); ++c) {
        for (int j = 0; j < sys.strands_of(c); ++j, ++group) {
            for (int it = 0; it < t_samples; ++it) {
                const double t = kTau * it / t_samples;
                const double cx = sys.x_of(c, j, t);
                const double cy = sys.y_of(c, j, t);
                const double cz = sys.z_of(c, j, t);
                const double rr = sys.radius_of(c, j, t);
                for (int m = 0; m < ring_angles; ++m) {
                    const double phi = kTau * m / ring_angles;
                    seeds.push_back({t, group,
                                     {lambda * (cx + rr * std::cos(phi)),
                                      lambda * (cy + rr * std::sin(phi)),
                                      lambda * cz},
                                     lambda * cx, lambda * cy, true});
                }
            }
        }
    }
    return seeds;
}

LambdaSelection select_lambda(const LaurentPoly& f,
                              const std::vector<SliceSeed>& seeds,
                              const VerifyConfig& cfg) {
    return run_selection(f, seeds, seeds, cfg);
}

LambdaSelection select_lambda(const LaurentPoly& f,
                              const std::vector<SliceSeed>& seeds,
                              const std::vector<SliceSeed>& dense_seeds,
                              const VerifyConfig& cfg) {
    return run_selection(f, seeds, dense_seeds, cfg);
}

GridScanReport grid_scan_extra(const LaurentPoly& f, double r,
                               const std::vector<SlicePoint>& tracked,
                               const VerifyConfig& cfg) {
    GridScanReport rep;
    std::vector<double> ts;
    for (const auto& p : tracked)
        if (p.converged) ts.push_back(p.t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.empty()) return rep;

    // The sphere slice at |v| = r meets the spatial coordinates at norm
    // sqrt(1 - r^2); zeros near that shell are the ones that could land on
    // the sphere. The scan cube also covers the tracked curves themselves so
    // that zeros appearing between tracked samples are reported rather than
    // silently ignored.
    const double ball = std::sqrt(std::max(0.0, 1.0 - r * r)) + 0.05;
    double extent = 0.0;
    for (const auto& p : tracked)
        if (p.converged) extent = std::max(extent, p.point.norm());
    const double domain = std::max(ball, 1.1 * extent);
    const LaurentPoly fx = f.derivative("x");
    const LaurentPoly fy = f.derivative("y");
    const LaurentPoly fz = f.derivative("z");
    const int n = cfg.scan_grid;
    const std::size_t slices = std::min<std::size_t>(8, ts.size());
    std::vector<std::vector<Vec3>> extras_by_slice(slices);
    parallel_for(slices, worker_count(cfg), [&](std::size_t si) {
        const double t = ts[(si * ts.size()) / slices];
        EvalSlice slice = at_radius(make_folded(f, fx, fy, fz, t), r);
        std::vector<std::pair<double, std::array<double, 3>>> vals;
        vals.reserve(static_cast<std::size_t>(n) * n * n);
        double gmax = 0.0;
        for (int iz = 0; iz < n; ++iz) {
            const double z = -domain + 2.0 * domain * (iz + 0.5) / n;
            for (int iy = 0; iy < n; ++iy) {
                const double y = -domain + 2.0 * domain * (iy + 0.5) / n;
                for (int ix = 0; ix < n; ++ix) {
                    const double x = -domain + 2.0 * domain * (ix + 0.5) / n;
                    slice.prime(x, y, z);
                    const double a =
                        std::abs(slice.F.eval(slice.px, slice.py, slice.pz));
                    gmax = std::max(gmax, a);
                    vals.push_back({a, {x, y, z}});
                }
            }
        }
        const double thresh = cfg.scan_threshold * gmax;
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < vals.size(); ++i)
            if (vals[i].first < thresh) cand.push_back(i);
        std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
            return vals[a].first < vals[b].first;
        });
        if (cand.size() > 200) cand.resize(200);
        std::vector<Vec3> extras;
        for (std::size_t ci : cand) {
            const auto& c = vals[ci].second;
            SlicePoint sp = refine_seed(slice, {t, -1, {c[0], c[1], c[2]}}, cfg);
            if (!sp.converged) continue;
            if (sp.point.norm() > domain) continue;
            double best = kInf;
            for (const auto& p : tracked) {
                if (!p.converged || std::abs(p.t - t) > 1e-9) continue;
                best = std::min(best, (p.point - sp.point).norm());
            }
            if (best < cfg.scan_match_tol) continue;
            bool dup = false;
            for (const auto& e : extras)
                if ((e - sp.point).norm() < cfg.scan_match_tol) dup = true;
            if (!dup) extras.push_back(sp.point);
        }
        extras_by_slice[si] = std::move(extras);
    });
    for (const auto& extras : extras_by_slice) {
        rep.flagged += static_cast<int>(extras.size());
        rep.extra_points.insert(rep.extra_points.end(), extras.begin(),
                                extras.end());
    }
    return rep;
}

ExtractionReport reextract_braid(const StrandSystem& sys,
                                 const StrandOptions& opts) {
    ExtractionReport rep;
    const LoopBraidWord& word = sys.word;
    const int l = word.length();
    const int s = word.strands;
    std::vector<std::pair<int, int>> strands;
    for (int c = 0; c < sys.component_count(); ++c)
        for (int j = 0; j < sys.strands_of(c); ++j) strands.push_back({c, j});
    if (static_cast<int>(strands.size()) != s) {
        rep.detail = "strand count mismatch";
        return rep;
    }
    if (l == 0) {
        rep.match = true;
        return rep;
    }

    auto ranks_at = [&](double t) {
        std::vector<double> xs(s);
        for (int i = 0; i < s; ++i)
            xs[i] = sys.x_of(strands[i].first, strands[i].second, t);
        std::vector<int> idx(s);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return xs[a] < xs[b]; });
        std::vector<int> rank(s);
        for (int k = 0; k < s; ++k) rank[idx[k]] = k;
        return rank;
    };

    bool all_match = true;
    auto fail = [&](int k, const std::string& msg) {
        all_match = false;
        if (rep.detail.empty())
            rep.detail = "interval " + std::to_string(k) + ": " + msg;
    };

    for (int k = 0; k < l; ++k) {
        const double t0 = kTau * k / l;
        const double t1 = kTau * (k + 1) / l;
        const auto r0 = ranks_at(t0);
        const auto r1 = ranks_at(t1);
        IntervalExtraction ext;
        ext.interval = k;
        std::vector<int> moved;
        for (int i = 0; i < s; ++i)
            if (r0[i] != r1[i]) moved.push_back(i);
        if (moved.size() != 2) {
            fail(k, "net permutation is not an adjacent transposition");
            rep.intervals.push_back(ext);
            continue;
        }
        const int A = moved[0], B = moved[1];
        if (std::abs(r0[A] - r0[B]) != 1 || r0[A] != r1[B] || r0[B] != r1[A]) {
            fail(k, "swapped strands are not adjacent");
            rep.intervals.push_back(ext);
            continue;
        }
        // Diagram positions count from the largest lane unless mirrored.
        const int upper_rank = std::max(r0[A], r0[B]);
        ext.position =
            opts.lane_flip ? std::min(r0[A], r0[B]) + 1 : s - upper_rank;

        // Transversal crossings of the pair inside the window.
        const int m = std::max(64, opts.dense_samples / std::max(1, l));
        const double h = (t1 - t0) * 1e-6;
        const double lo = t0 + h, hi = t1 - h;
        auto dpair = [&](double t) {
            return sys.x_of(strands[A].first, strands[A].second, t) -
                   sys.x_of(strands[B].first, strands[B].second, t);
        };
        std::vector<double> times;
        double prev = dpair(lo);
        double pt = lo;
        for (int q = 1; q <= m; ++q) {
            const double t = lo + (hi - lo) * q / m;
            const double cur = dpair(t);
            if ((prev < 0.0) != (cur < 0.0)) {
                double a = pt, b = t, fa = prev;
                while (b - a > opts.bisect_tol) {
                    const double mid = 0.5 * (a + b);
                    const double fm = dpair(mid);
                    if ((fa < 0.0) != (fm < 0.0))
                        b = mid;
                    else {
                        a = mid;
                        fa = fm;
                    }
                }
                times.push_back(0.5 * (a + b));
            }
            prev = cur;
            pt = t;
        }
        if (times.empty()) {
            fail(k, "no transversal crossing of the swapped pair");
            rep.intervals.push_back(ext);
            continue;
        }
        // First crossing of the pair: the height levels are constant across
        // the interval, so it carries the cleanest over/under ordering.
        const double tstar = times.front();
        ext.time = tstar;
        // Positions count from the largest lane, so the letter's own position
        // is held by the strand with the larger rank at the interval start.
        const int a = (r0[A] > r0[B]) ? A : B;
        const int b = (a == A) ? B : A;
        const auto [ac, aj] = strands[a];
        const auto [bc, bj] = strands[b];

        if (sys.kind == SystemKind::classical) {
            ext.kind = TokenKind::sigma;
            ext.sign =
                sys.y_of(ac, aj, tstar) > sys.y_of(bc, bj, tstar) ? 1 : -1;
        } else {
            const double za = sys.z_of(ac, aj, tstar);
            const double zb = sys.z_of(bc, bj, tstar);
            const double ra = sys.radius_of(ac, aj, tstar);
            const double rb = sys.radius_of(bc, bj, tstar);
            const double cd = std::hypot(
                sys.x_of(ac, aj, tstar) - sys.x_of(bc, bj, tstar),
                sys.y_of(ac, aj, tstar) - sys.y_of(bc, bj, tstar));
            const bool nested = cd + std::min(ra, rb) < std::max(ra, rb);
            if (std::abs(za - zb) < 1e-6 && nested) {
                ext.kind = TokenKind::sigma;
                const bool a_passes = ra < rb;
                const double hstep = 1e-6;
                // Height slope against the ring's own angle; strands of
                // different components sweep their circles at different rates.
                auto dz = [&](int c, int j) {
                    return (sys.z_of(c, j, tstar + hstep) -
                            sys.z_of(c, j, tstar - hstep)) /
                           (2.0 * hstep) * sys.strands_of(c);
                };
                const double dpass = a_passes ? dz(ac, aj) : dz(bc, bj);
                const double dother = a_passes ? dz(bc, bj) : dz(ac, aj);
                ext.sign = dpass < dother ? 1 : -1;
            } else {
                ext.kind = TokenKind::rho;
                ext.sign =
                    sys.y_of(ac, aj, tstar) > sys.y_of(bc, bj, tstar) ? 1 : -1;
            }
        }
        rep.intervals.push_back(ext);
        const BraidToken& tok = word.tokens[k];
        if (tok.kind != ext.kind || tok.index != ext.position ||
            tok.sign != ext.sign)
            fail(k, "extracted " + token_text(ext.kind, ext.position, ext.sign) +
                        ", word has " +
                        token_text(tok.kind, tok.index, tok.sign));
    }
    rep.match = all_match;
    return rep;
}

FibrationReport fibration_check(const ConstructionResult& res, int sample_count,
                                std::uint64_t seed) {
    if (res.algorithm != "spin")
        throw std::invalid_argument(
            "fibration-check: requires a spun construction");
    FibrationReport rep;
    const int s = res.system ? res.system->word.strands : res.g.degree("u");
    const int n = res.bound ? res.bound->spin : 0;
    rep.expected = s * n;
    if (n == 0) {
        rep.skipped = true;
        rep.pass = true;
        rep.note = "twist count is zero; the argument is constant along the "
                   "second circle";
        return rep;
    }
    if (s <= 1) {
        rep.skipped = true;
        rep.pass = true;
        rep.note = "single strand; no critical points in the fibre variable";
        return rep;
    }
    const LaurentPoly gchi = res.g.circle_derivative("w");
    auto rng = seeded_rng(seed, 0x60F1B7A110C4ULL);
    std::uniform_real_distribution<double> ang(0.0, kTau);
    for (int i = 0; i < sample_count; ++i) {
        const double phi = ang(rng);
        const double chi = ang(rng);
        const auto v0 = std::polar(1.0, phi);
        const auto w0 = std::polar(1.0, chi);
        const LaurentPoly gs = substitute(substitute(res.g, "v", v0), "w", w0);
        const LaurentPoly gcs = substitute(substitute(gchi, "v", v0), "w", w0);
        const LaurentPoly du = gs.derivative("u");
        const int dd = du.degree("u");
        std::vector<std::complex<double>> cs(static_cast<std::size_t>(dd) + 1,
                                             0.0);
        for (const auto& [e, c] : du.terms()) cs[e[0]] += c;
        for (const auto& u0 : poly_roots(cs)) {
            const auto gval = gs.eval({u0});
            if (std::abs(gval) < 1e-14) continue;
            const auto cval = gcs.eval({u0});
            const double value = (cval / gval).imag();
            rep.samples.push_back({phi, chi, u0, value});
            rep.max_rel_error =
                std::max(rep.max_rel_error,
                         std::abs(value - rep.expected) / std::abs(rep.expected));
        }
    }
    rep.pass = !rep.samples.empty() && rep.max_rel_error <= 1e-6;
    rep.note = rep.pass ? "ok" : "twist rate deviates from the expected value";
    return rep;
}

std::vector<std::complex<double>> poly_roots(
    const std::vector<std::complex<double>>& coeffs) {
    std::vector<std::complex<double>> c = coeffs;
    double mx = 0.0;
    for (const auto& v : c) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) return {};
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * mx) c.pop_back();
    const int d = static_cast<int>(c.size()) - 1;
    if (d < 1) return {};
    if (d == 1) return {-c[0] / c[1]};
    if (d == 2) {
        // Cancellation-safe quadratic: pick the square-root branch aligned
        // with b, divide the small root out of the product.
        const auto a = c[2], b = c[1], c0 = c[0];
        std::complex<double> sd = std::sqrt(b * b - 4.0 * a * c0);
        if (b.real() * sd.real() + b.imag() * sd.imag() < 0.0) sd = -sd;
        const std::complex<double> q = -0.5 * (b + sd);
        if (std::abs(q) == 0.0) return {{0.0, 0.0}, -b / a};
        return {q / a, c0 / q};
    }
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -c[i] / c[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("root-finding: eigenvalue iteration failed");
    std::vector<std::complex<double>> roots(d);
    for (int i = 0; i < d; ++i) roots[i] = es.eigenvalues()(i);
    return roots;
}

VerificationReport verify_construction(const ConstructionResult& res,
                                       const VerifyConfig& cfg) {
    VerificationReport rep;
    if (res.algorithm == "torus") {
        rep.containment_pass = true;
        rep.extraction.match = true;
        rep.extraction.detail = "no braid word attached";
        rep.notes.push_back(
            "torus builder: sheet disjointness is enforced at construction");
        rep.pass = true;
        return rep;
    }
    if (res.algorithm == "classical" || res.algorithm == "spin") {
        rep.containment_pass = true;
        rep.notes.push_back(
            "spatial slice certification applies to ring constructions only");
        if (res.system) {
            rep.extraction = reextract_braid(*res.system);
        } else {
            rep.extraction.detail = "no strand system attached";
        }
        bool ok = rep.extraction.match;
        if (res.algorithm == "spin") {
            rep.fibration = fibration_check(res, 64, 0);
            ok = ok && rep.fibration->pass;
        }
        rep.pass = ok;
        return rep;
    }

    if (!res.system) {
        rep.notes.push_back("no strand system attached");
        return rep;
    }
    const StrandSystem& sys = *res.system;
    auto build_seeds = [&](int t_samples, int ring_angles) {
        if (res.algorithm != "satellite")
            return ring_seeds(sys, res.lambda, t_samples, ring_angles);
        std::vector<SliceSeed> seeds;
        int group = 0;
        for (int c = 0; c < sys.component_count(); ++c) {
            for (int j = 0; j < sys.strands_of(c); ++j, ++group) {
                const auto pts =
                    satellite_strand_points(res, c, j, t_samples, ring_angles);
                if (pts.empty()) continue;
                const std::size_t per_t = pts.size() / t_samples;
                for (std::size_t idx = 0; idx < pts.size(); ++idx) {
                    const double t =
                        kTau * static_cast<double>(idx / per_t) / t_samples;
                    seeds.push_back(
                        {t, group, pts[idx],
                         res.lambda * sys.x_of(c, j, t),
                         res.lambda * sys.y_of(c, j, t), true});
                }
            }
        }
        return seeds;
    };

    // Coarse continuation fixes the retraction depth and the tracking
    // health; the recorded certification slices use the dense seed grids.
    const LambdaSelection sel =
        run_selection(res.f, build_seeds(cfg.t_samples, cfg.ring_angles),
                      build_seeds(cfg.cert_t_samples, cfg.cert_ring_angles),
                      cfg);
    rep.selection = sel;
    if (!sel.pass) {
        rep.notes.push_back("scale selection: " + sel.note);
        rep.extraction = reextract_braid(sys);
        return rep;
    }

    const std::vector<double> targets{1.0, 1.0 - sel.delta / 2.0,
                                      1.0 - sel.delta};
    rep.slices = track_to_radii(
        res.f, build_seeds(cfg.cert_t_samples, cfg.cert_ring_angles), targets,
        cfg);
    bool slices_ok = rep.slices.size() == 3;
    for (const auto& s : rep.slices)
        slices_ok = slices_ok && slice_healthy(s, cfg);
    if (!slices_ok) rep.notes.push_back("slice certification failed");
    if (rep.slices.size() == 3)
        rep.selection.spatial_extent = rep.slices.back().max_norm;
    rep.containment_pass =
        slices_ok && rep.selection.spatial_extent < sel.allowance;
    if (slices_ok && !rep.containment_pass)
        rep.notes.push_back(
            "spatial extent exceeds the retraction allowance");

    for (const auto& s : rep.slices) {
        const GridScanReport scan = grid_scan_extra(res.f, s.r, s.points, cfg);
        rep.extra_component_flags += scan.flagged;
    }
    if (rep.extra_component_flags > 0)
        rep.notes.push_back("grid scan flagged unexpected zeros inside the ball");

    rep.extraction = reextract_braid(sys);
    rep.pass = rep.containment_pass && slices_ok && rep.extraction.match;
    return rep;
}

}  // namespace braidforge
