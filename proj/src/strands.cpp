#include "braidforge/strands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace braidforge {

namespace {

struct FlatStrand {
    StrandRef ref;
    int start_pos = 0;  // 1-based diagram position at t = 0
};

std::vector<FlatStrand> flat_strands(const ComponentDecomposition& d) {
    std::vector<FlatStrand> out;
    for (int c = 0; c < d.component_count(); ++c)
        for (int j = 0; j < d.strand_count(c); ++j)
            out.push_back({{c, j}, d.start_position(c, j)});
    return out;
}

double strand_angle_of(const ComponentDecomposition& d, const StrandRef& r, double t) {
    return (t + kTau * r.strand) / d.strand_count(r.comp);
}

double x_curve(const ComponentDecomposition& d, const std::vector<TrigPoly>& F,
               const StrandRef& r, double t) {
    return F[r.comp].eval(strand_angle_of(d, r, t));
}

[[noreturn]] void stage_fail(const std::string& stage, const std::string& what) {
    throw std::runtime_error(stage + ": " + what);
}

}  // namespace

double StrandSystem::strand_angle(int c, int j, double t) const {
    return (t + kTau * j) / decomposition.strand_count(c);
}

double StrandSystem::x_of(int c, int j, double t) const {
    return comps[c].F.eval(strand_angle(c, j, t));
}

double StrandSystem::y_of(int c, int j, double t) const {
    return comps[c].G.eval(strand_angle(c, j, t));
}

double StrandSystem::z_of(int c, int j, double t) const {
    return comps[c].H.eval(strand_angle(c, j, t));
}

double StrandSystem::radius_of(int c, int j, double t) const {
    return epsilon * comps[c].R.eval(strand_angle(c, j, t));
}

double lane_value(int p, int s, bool flip) {
    const double centered = (s + 1) / 2.0 - p;
    return flip ? -centered : centered;
}

std::vector<NodeList> extract_x_data(const LoopBraidWord& word,
                                     const ComponentDecomposition& decomp,
                                     bool lane_flip,
                                     const std::vector<double>& lane_jitter) {
    const int l = word.length();
    if (l < 1) stage_fail("x-data", "word must contain at least one token");
    const int s = word.strands;
    const auto timeline = position_timeline(word);

    std::vector<NodeList> nodes(decomp.component_count());
    for (const auto& fs : flat_strands(decomp)) {
        const int sc = decomp.strand_count(fs.ref.comp);
        for (int k = 0; k < l; ++k) {
            const int pos = timeline[k][fs.start_pos - 1];
            double lane = lane_value(pos, s, lane_flip);
            if (!lane_jitter.empty()) lane += lane_jitter[pos - 1];
            const double angle = (kTau * k / l + kTau * fs.ref.strand) / sc;
            nodes[fs.ref.comp].angles.push_back(angle);
            nodes[fs.ref.comp].values.push_back(lane);
        }
    }
    return nodes;
}

std::vector<TrigPoly> build_F(const std::vector<NodeList>& nodes) {
    std::vector<TrigPoly> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(trig_interpolate(n.angles, n.values));
    return out;
}

namespace {

// Refine a bracketed sign change of f to within tol.
template <typename F>
double bisect(F&& f, double lo, double hi, double flo, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct RawEvent {
    double time;
    int a, b;  // flat strand indices
};

}  // namespace

std::vector<CrossingEvent> detect_crossings(const LoopBraidWord& word,
                                            const ComponentDecomposition& decomp,
                                            const std::vector<TrigPoly>& F,
                                            const StrandOptions& opts) {
    const int l = word.length();
    if (l < 1) stage_fail("crossing-detection", "word must contain at least one token");
    const auto strands = flat_strands(decomp);
    const int ns = static_cast<int>(strands.size());
    const int N = opts.dense_samples;
    const double h = kTau / N;

    std::vector<RawEvent> raw;
    for (int ia = 0; ia < ns; ++ia) {
        for (int ib = ia + 1; ib < ns; ++ib) {
            auto diff = [&](double t) {
                return x_curve(decomp, F, strands[ia].ref, t) -
                       x_curve(decomp, F, strands[ib].ref, t);
            };
            std::vector<double> d(N + 1);
            for (int i = 0; i <= N; ++i) d[i] = diff(i * h);
            for (int i = 0; i < N; ++i) {
                const bool change = (d[i] <= 0.0) != (d[i + 1] <= 0.0);
                if (change) {
                    const double t0 = bisect(diff, i * h, (i + 1) * h, d[i], opts.bisect_tol);
                    raw.push_back({t0, ia, ib});
                } else if (i > 0 && std::abs(d[i]) < 1e-7 &&
                           std::abs(d[i]) <= std::abs(d[i - 1]) &&
                           std::abs(d[i]) <= std::abs(d[i + 1]) &&
                           (d[i - 1] <= 0.0) == (d[i + 1] <= 0.0)) {
                    // Both neighbours on the same side: a touch, not a
                    // transversal crossing that happens to hit a sample.
                    std::ostringstream msg;
                    msg << "tangential contact of strand x-graphs near t=" << i * h
                        << " (perturb data values and retry)";
                    stage_fail("crossing-detection", msg.str());
                }
            }
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const RawEvent& p, const RawEvent& q) { return p.time < q.time; });

    // Classify against the target word interval by interval.
    const auto timeline = position_timeline(word);
    const double interval_len = kTau / l;
    std::vector<CrossingEvent> events;
    events.reserve(raw.size());

    size_t idx = 0;
    for (int k = 0; k < l; ++k) {
        const double t_end = (k + 1) * interval_len;
        // Current rank of each strand (indexed like `strands`).
        std::vector<int> rank(ns);
        for (int i = 0; i < ns; ++i) rank[i] = timeline[k][strands[i].start_pos - 1];

        const auto& tok = word.tokens[k];
        int A = -1, B = -1;  // flat ids of the target pair at interval start
        for (int i = 0; i < ns; ++i) {
            if (rank[i] == tok.index) A = i;
            if (rank[i] == tok.index + 1) B = i;
        }
        bool target_found = false;

        while (idx < raw.size() && raw[idx].time < t_end) {
            const RawEvent& ev = raw[idx];
            int ia = ev.a, ib = ev.b;
            if (std::abs(rank[ia] - rank[ib]) != 1)
                stage_fail("crossing-classification",
                           "non-adjacent strands appear to cross; crossing list inconsistent");
            CrossingEvent ce;
            ce.time = ev.time;
            ce.interval = k;
            const bool is_target_pair = (ia == A && ib == B) || (ia == B && ib == A);
            if (is_target_pair && !target_found) {
                target_found = true;
                ce.a = strands[A].ref;
                ce.b = strands[B].ref;
                ce.kind = (tok.kind == TokenKind::sigma) ? EventKind::target_sigma
                                                         : EventKind::target_rho;
                ce.sign = tok.sign;
                ce.token_index = tok.index;
                if (ce.kind == EventKind::target_sigma)
                    ce.passer = (tok.sign > 0) ? ce.a : ce.b;
            } else {
                // Order spurious pairs by current rank for determinism.
                if (rank[ia] > rank[ib]) std::swap(ia, ib);
                ce.a = strands[ia].ref;
                ce.b = strands[ib].ref;
                ce.kind = EventKind::spurious;
            }
            events.push_back(ce);
            std::swap(rank[ev.a], rank[ev.b]);
            ++idx;
        }

        for (int i = 0; i < ns; ++i) {
            if (rank[i] != timeline[k + 1][strands[i].start_pos - 1])
                stage_fail("crossing-classification",
                           "interval crossings do not realize the target transposition");
        }
        if (!target_found)
            stage_fail("crossing-classification",
                       "no crossing between the target pair in its interval");
    }
    if (idx != raw.size())
        stage_fail("crossing-classification", "crossing outside every interval");
    return events;
}

std::vector<NodeList> assign_y_values(const LoopBraidWord& word,
                                      const ComponentDecomposition& decomp,
                                      const std::vector<CrossingEvent>& events,
                                      const std::vector<double>& y_jitter) {
    const int l = word.length();
    const int s = word.strands;
    const auto timeline = position_timeline(word);

    // Start position (1-based) of a strand ref.
    auto start_pos = [&](const StrandRef& r) {
        return decomp.start_position(r.comp, r.strand);
    };

    // Per-interval levels y_{i,j,k}, keyed by start position.
    // Base level: twice the diagram position at the interval start; target
    // over/under ordering applied by swapping the pair's levels.
    std::vector<std::vector<double>> level(l, std::vector<double>(s + 1, 0.0));
    for (int k = 0; k < l; ++k) {
        for (int p = 1; p <= s; ++p) {
            double y = 2.0 * timeline[k][p - 1];
            if (!y_jitter.empty()) y += y_jitter[k * s + (p - 1)];
            level[k][p] = y;
        }
    }
    for (const auto& ev : events) {
        if (ev.kind != EventKind::target_rho) continue;
        const int pa = start_pos(ev.a), pb = start_pos(ev.b);
        // Positive sign: the strand at the lower position passes over.
        const int over = (ev.sign > 0) ? pa : pb;
        const int under = (over == pa) ? pb : pa;
        if (level[ev.interval][over] < level[ev.interval][under])
            std::swap(level[ev.interval][over], level[ev.interval][under]);
    }

    std::vector<NodeList> nodes(decomp.component_count());
    auto push = [&](const StrandRef& r, double time, double value) {
        nodes[r.comp].angles.push_back(strand_angle_of(decomp, r, time));
        nodes[r.comp].values.push_back(value);
    };
    for (const auto& ev : events) {
        const int k = ev.interval;
        if (ev.kind == EventKind::target_sigma) {
            const double shared =
                0.5 * (level[k][start_pos(ev.a)] + level[k][start_pos(ev.b)]);
            push(ev.a, ev.time, shared);
            push(ev.b, ev.time, shared);
        } else {
            push(ev.a, ev.time, level[k][start_pos(ev.a)]);
            push(ev.b, ev.time, level[k][start_pos(ev.b)]);
        }
    }
    return nodes;
}

std::vector<TrigPoly> build_G(const std::vector<NodeList>& nodes) {
    std::vector<TrigPoly> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) {
        if (n.angles.empty())
            out.emplace_back(0.0);  // strand never crosses; any height works
        else
            out.push_back(trig_interpolate(n.angles, n.values));
    }
    return out;
}

std::vector<TrigPoly> build_H(const ComponentDecomposition& decomp,
                              const std::vector<CrossingEvent>& events) {
    std::vector<std::vector<HermiteNode>> data(decomp.component_count());
    for (const auto& ev : events) {
        if (ev.kind != EventKind::target_sigma) continue;
        // Both strands level out at height 0; the interval-start lower
        // position dips through (slope -1), the other rises (slope +1).
        data[ev.a.comp].push_back({strand_angle_of(decomp, ev.a, ev.time), 0.0, -1.0});
        data[ev.b.comp].push_back({strand_angle_of(decomp, ev.b, ev.time), 0.0, 1.0});
    }
    std::vector<TrigPoly> out;
    out.reserve(data.size());
    for (const auto& d : data) {
        if (d.empty())
            out.emplace_back(0.0);
        else
            out.push_back(trig_hermite_interpolate(d));
    }
    return out;
}

std::vector<TrigPoly> build_R(const ComponentDecomposition& decomp,
                              const std::vector<CrossingEvent>& events, int grid) {
    std::vector<NodeList> data(decomp.component_count());
    for (const auto& ev : events) {
        if (ev.kind != EventKind::target_sigma) continue;
        const StrandRef other = (ev.passer == ev.a) ? ev.b : ev.a;
        data[ev.passer.comp].angles.push_back(
            strand_angle_of(decomp, ev.passer, ev.time));
        data[ev.passer.comp].values.push_back(1.0);
        data[other.comp].angles.push_back(strand_angle_of(decomp, other, ev.time));
        data[other.comp].values.push_back(2.0);
    }
    std::vector<TrigPoly> out;
    out.reserve(data.size());
    for (const auto& d : data) {
        if (d.angles.empty())
            out.emplace_back(1.0);
        else
            out.push_back(trig_interpolate(d.angles, d.values));
    }
    // One shared shift keeps every radius at least 1 on the grid.
    double shift = 0.0;
    for (const auto& r : out) {
        double mn = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) mn = std::min(mn, r.eval(kTau * i / grid));
        shift = std::max(shift, std::max(0.0, 1.0 - mn));
    }
    if (shift > 0.0)
        for (auto& r : out) r += TrigPoly(shift);
    return out;
}

namespace {

double center_distance(const StrandSystem& sys, const StrandRef& p,
                       const StrandRef& q, double t) {
    const double dx = sys.x_of(p.comp, p.strand, t) - sys.x_of(q.comp, q.strand, t);
    const double dy = sys.y_of(p.comp, p.strand, t) - sys.y_of(q.comp, q.strand, t);
    return std::hypot(dx, dy);
}

double raw_radius(const StrandSystem& sys, const StrandRef& r, double t) {
    return sys.comps[r.comp].R.eval(sys.strand_angle(r.comp, r.strand, t));
}

bool near_sigma_event(const std::vector<CrossingEvent>& events, const StrandRef& p,
                      const StrandRef& q, double t, double window) {
    for (const auto& ev : events) {
        if (ev.kind != EventKind::target_sigma) continue;
        if (!(ev.involves(p) && ev.involves(q))) continue;
        double dt = std::abs(t - ev.time);
        dt = std::min(dt, kTau - dt);
        if (dt < window) return true;
    }
    return false;
}

}  // namespace

double epsilon_threshold(const StrandSystem& sys, const StrandOptions& opts) {
    const auto strands = flat_strands(sys.decomposition);
    const int ns = static_cast<int>(strands.size());
    const int N = opts.dense_samples;
    const double h = kTau / N;
    double best = std::numeric_limits<double>::infinity();

    // Shared-height clearance: wherever two strands agree in z, their rings
    // must stay separated after scaling, so the ratio distance / radius-sum
    // bounds the admissible scale.
    for (int ia = 0; ia < ns; ++ia) {
        for (int ib = ia + 1; ib < ns; ++ib) {
            const StrandRef P = strands[ia].ref, Q = strands[ib].ref;
            auto dz = [&](double t) {
                return sys.z_of(P.comp, P.strand, t) - sys.z_of(Q.comp, Q.strand, t);
            };
            auto ratio_at = [&](double t) {
                const double d = center_distance(sys, P, Q, t);
                return d / (raw_radius(sys, P, t) + raw_radius(sys, Q, t));
            };
            std::vector<double> d(N + 1);
            double dmax = 0.0;
            for (int i = 0; i <= N; ++i) {
                d[i] = dz(i * h);
                dmax = std::max(dmax, std::abs(d[i]));
            }
            if (dmax < 1e-9) {
                // Heights agree identically; the clearance must hold always.
                for (int i = 0; i < N; ++i) best = std::min(best, ratio_at(i * h));
                continue;
            }
            for (int i = 0; i < N; ++i) {
                double root = -1.0;
                if ((d[i] <= 0.0) != (d[i + 1] <= 0.0))
                    root = bisect(dz, i * h, (i + 1) * h, d[i], opts.bisect_tol);
                else if (i > 0 && std::abs(d[i]) < 1e-8 &&
                         std::abs(d[i]) <= std::abs(d[i - 1]) &&
                         std::abs(d[i]) <= std::abs(d[i + 1]))
                    root = i * h;  // tangential shared-height contact
                if (root < 0.0) continue;
                if (near_sigma_event(sys.events, P, Q, root, 1e-6)) continue;
                const double dist = center_distance(sys, P, Q, root);
                if (dist < 1e-9)
                    stage_fail("radius-scaling",
                               "strand centers coincide at a shared-height time away "
                               "from any passing event");
                best = std::min(best, ratio_at(root));
            }
        }
    }

    // Clearance around each passing event: rings not involved must stay clear
    // of the nested pair, measured at the passing strand's curve parameter.
    for (const auto& ev : sys.events) {
        if (ev.kind != EventKind::target_sigma) continue;
        const double theta =
            sys.strand_angle(ev.passer.comp, ev.passer.strand, ev.time);
        const double cx = sys.comps[ev.passer.comp].F.eval(theta);
        const double cy = sys.comps[ev.passer.comp].G.eval(theta);
        const double rad_max =
            std::max(raw_radius(sys, ev.a, ev.time), raw_radius(sys, ev.b, ev.time));
        for (int c = 0; c < sys.component_count(); ++c) {
            if (c == ev.a.comp || c == ev.b.comp) continue;
            const double dx = sys.comps[c].F.eval(theta) - cx;
            const double dy = sys.comps[c].G.eval(theta) - cy;
            const double dist = std::hypot(dx, dy);
            best = std::min(best, dist / (sys.comps[c].R.eval(theta) + rad_max));
        }
    }
    return best;
}

std::vector<std::string> check_system_invariants(const StrandSystem& sys,
                                                 const StrandOptions& opts) {
    std::vector<std::string> bad;
    const auto strands = flat_strands(sys.decomposition);
    const int ns = static_cast<int>(strands.size());
    const int N = opts.grid;
    const double h = kTau / N;
    const bool loop = (sys.kind == SystemKind::loop);

    for (int ia = 0; ia < ns; ++ia) {
        for (int ib = ia + 1; ib < ns; ++ib) {
            const StrandRef P = strands[ia].ref, Q = strands[ib].ref;
            for (int i = 0; i < N; ++i) {
                const double t = i * h;
                const bool near_sigma =
                    loop && near_sigma_event(sys.events, P, Q, t, 1e-4);
                const double d = center_distance(sys, P, Q, t);
                if (!near_sigma && d < 1e-9) {
                    bad.push_back("strand centers touch away from passing events");
                    break;
                }
                if (!loop) continue;
                const double zdiff = std::abs(sys.z_of(P.comp, P.strand, t) -
                                              sys.z_of(Q.comp, Q.strand, t));
                if (zdiff < 1e-6 && !near_sigma) {
                    const double rsum = sys.radius_of(P.comp, P.strand, t) +
                                        sys.radius_of(Q.comp, Q.strand, t);
                    if (d <= rsum) {
                        bad.push_back("rings overlap at a shared-height time");
                        break;
                    }
                }
            }
        }
    }

    if (loop) {
        for (int c = 0; c < sys.component_count(); ++c) {
            for (int i = 0; i < N; ++i) {
                if (sys.epsilon * sys.comps[c].R.eval(i * h) <= 0.0) {
                    bad.push_back("radius not strictly positive on the grid");
                    break;
                }
            }
        }
    }

    for (const auto& ev : sys.events) {
        const double t = ev.time;
        const double xa = sys.x_of(ev.a.comp, ev.a.strand, t);
        const double xb = sys.x_of(ev.b.comp, ev.b.strand, t);
        if (std::abs(xa - xb) > 1e-8)
            bad.push_back("crossing event does not meet in x");
        if (!loop) {
            if (ev.kind == EventKind::target_sigma || ev.kind == EventKind::target_rho) {
                // Classical: over/under ordering realized in y.
                const double ya = sys.y_of(ev.a.comp, ev.a.strand, t);
                const double yb = sys.y_of(ev.b.comp, ev.b.strand, t);
                const double over = (ev.sign > 0) ? ya : yb;
                const double under = (ev.sign > 0) ? yb : ya;
                if (!(over > under))
                    bad.push_back("crossing sign not realized by the height order");
            }
            continue;
        }
        if (ev.kind == EventKind::target_rho) {
            const double ya = sys.y_of(ev.a.comp, ev.a.strand, t);
            const double yb = sys.y_of(ev.b.comp, ev.b.strand, t);
            const double over = (ev.sign > 0) ? ya : yb;
            const double under = (ev.sign > 0) ? yb : ya;
            if (!(over > under))
                bad.push_back("exchange crossing sign not realized by the height order");
        } else if (ev.kind == EventKind::target_sigma) {
            const double za = sys.z_of(ev.a.comp, ev.a.strand, t);
            const double zb = sys.z_of(ev.b.comp, ev.b.strand, t);
            if (std::abs(za - zb) > 1e-8)
                bad.push_back("passing event heights differ");
            const double ha = sys.comps[ev.a.comp].H.derivative().eval(
                sys.strand_angle(ev.a.comp, ev.a.strand, t));
            const double hb = sys.comps[ev.b.comp].H.derivative().eval(
                sys.strand_angle(ev.b.comp, ev.b.strand, t));
            const StrandRef other = (ev.passer == ev.a) ? ev.b : ev.a;
            const double hp = (ev.passer == ev.a) ? ha : hb;
            const double ho = (ev.passer == ev.a) ? hb : ha;
            if ((ev.sign > 0 && !(hp < ho)) || (ev.sign < 0 && !(hp > ho)))
                bad.push_back("passing slope order does not match the crossing sign");
            const double rp = sys.radius_of(ev.passer.comp, ev.passer.strand, t);
            const double ro = sys.radius_of(other.comp, other.strand, t);
            if (!(rp < ro))
                bad.push_back("passing strand radius not strictly smaller");
            const double d = center_distance(sys, ev.a, ev.b, t);
            if (!(d + rp < ro))
                bad.push_back("rings not strictly nested at the passing event");
        }
    }
    return bad;
}

namespace {

StrandSystem assemble(SystemKind kind, const LoopBraidWord& word,
                      const StrandOptions& opts) {
    const auto decomp = strand_components(word);
    std::string last_error = "strand pipeline failed";
    const int s = word.strands;
    const int l = word.length();

    for (int fa = 0; fa < opts.max_attempts; ++fa) {
        std::vector<double> lane_jitter;
        if (fa > 0) {
            auto rng = seeded_rng(opts.seed, 0xF001 + fa);
            std::uniform_real_distribution<double> u(-0.1, 0.1);
            lane_jitter.resize(s);
            for (auto& v : lane_jitter) v = u(rng);
        }

        std::vector<TrigPoly> F;
        std::vector<CrossingEvent> events;
        try {
            F = build_F(extract_x_data(word, decomp, opts.lane_flip, lane_jitter));
            for (const auto& f : F)
                if (f.max_abs_coeff() > opts.coeff_limit)
                    stage_fail("x-interpolation", "coefficients exceed the retry limit");
            events = detect_crossings(word, decomp, F, opts);
            if (kind == SystemKind::classical) {
                // Classical crossings are realized purely by the height order.
                for (auto& ev : events)
                    if (ev.kind == EventKind::target_sigma)
                        ev.kind = EventKind::target_rho;
            }
        } catch (const std::exception& e) {
            last_error = e.what();
            continue;
        }

        std::vector<TrigPoly> G;
        bool g_ok = false;
        for (int ya = 0; ya < opts.max_attempts && !g_ok; ++ya) {
            std::vector<double> y_jitter;
            if (ya > 0) {
                auto rng = seeded_rng(opts.seed, 0xCAFE + 100 * fa + ya);
                std::uniform_real_distribution<double> u(-0.2, 0.2);
                y_jitter.resize(static_cast<size_t>(s) * l);
                for (auto& v : y_jitter) v = u(rng);
            }
            try {
                G = build_G(assign_y_values(word, decomp, events, y_jitter));
                for (const auto& g : G)
                    if (g.max_abs_coeff() > opts.coeff_limit)
                        stage_fail("y-interpolation",
                                   "coefficients exceed the retry limit");
                g_ok = true;
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (!g_ok) continue;

        try {
            StrandSystem sys;
            sys.kind = kind;
            sys.word = word;
            sys.decomposition = decomp;
            sys.events = events;
            sys.comps.resize(decomp.component_count());
            for (int c = 0; c < decomp.component_count(); ++c) {
                sys.comps[c].F = F[c];
                sys.comps[c].G = G[c];
                sys.comps[c].H = TrigPoly(0.0);
                sys.comps[c].R = TrigPoly(1.0);
            }
            if (kind == SystemKind::loop) {
                auto H = build_H(decomp, events);
                auto R = build_R(decomp, events, opts.grid);
                for (int c = 0; c < decomp.component_count(); ++c) {
                    if (H[c].max_abs_coeff() > opts.coeff_limit ||
                        R[c].max_abs_coeff() > opts.coeff_limit)
                        stage_fail("z-interpolation",
                                   "coefficients exceed the retry limit");
                    sys.comps[c].H = H[c];
                    sys.comps[c].R = R[c];
                }
                const double thr = epsilon_threshold(sys, opts);
                sys.epsilon_threshold = thr;
                sys.epsilon = std::min(1.0, 0.9 * thr);
            }
            const auto bad = check_system_invariants(sys, opts);
            if (!bad.empty()) stage_fail("invariant-check", bad.front());
            return sys;
        } catch (const std::exception& e) {
            last_error = e.what();
            continue;
        }
    }
    throw std::runtime_error(last_error);
}

}  // namespace

StrandSystem loop_strand_system(const LoopBraidWord& word, const StrandOptions& opts) {
    return assemble(SystemKind::loop, word, opts);
}

StrandSystem classical_strand_system(const ClassicalBraidWord& word,
                                     const StrandOptions& opts) {
    return assemble(SystemKind::classical, as_loop_word(word), opts);
}

}  // namespace braidforge
