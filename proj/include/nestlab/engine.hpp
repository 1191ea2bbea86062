#pragma once

// Scalar-generic first-return machinery for even unimodal maps on I=[-1,1]
// with critical point 0: orbit returns, monotone-branch pullbacks, principal
// nest construction, return/landing domain enumeration.  Everything is
// templated on the scalar R (double or BigFloat) so deep levels and deep
// parameter bisections can run in software floating point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "nestlab/bigfloat.hpp"
#include "nestlab/errors.hpp"
#include "nestlab/maps.hpp"

namespace nestlab::engine {

using std::abs;

template <class R> struct Interval {
    R lo{}, hi{};
    R width() const { return hi - lo; }
    bool contains(const R& x) const { return x >= lo && x <= hi; }
};

template <class R> int bisect_iters() { return real_traits<R>::is_big ? 300 : 120; }

template <class R> R machine_eps() {
    return real_traits<R>::is_big ? R(std::numeric_limits<BigFloat>::epsilon().convert_to<double>())
                                  : R(std::numeric_limits<double>::epsilon());
}

// Solve g(x) = target on [lo,hi] where g is strictly monotone and the
// endpoint values straddle target.  Plain bisection: robust at any precision.
template <class R, class G> R monotone_solve(G&& g, R lo, R hi, const R& target) {
    R glo = g(lo);
    R ghi = g(hi);
    bool inc = ghi > glo;
    if ((inc && (target < glo || target > ghi)) || (!inc && (target > glo || target < ghi)))
        raise(Errc::PrecisionExhausted, "monotone_solve: target outside bracket");
    int iters = bisect_iters<R>();
    for (int i = 0; i < iters; ++i) {
        R mid = (lo + hi) / 2;
        if (mid == lo || mid == hi) break;
        R gm = g(mid);
        if ((gm < target) == inc)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

// ---------------------------------------------------------------------------
// Critical orbit bookkeeping

enum class ReturnEvent { Returned, Escaped, CriticalHit };

template <class R> struct PointReturn {
    ReturnEvent event = ReturnEvent::Escaped;
    int time = 0;    // first k >= 1 with |f^k(x)| <= p
    R value{};       // f^time(x)
    int orientation = 1; // sign of (f^time)'(x) along the way
};

// First return of the point x to [-p, p]; also reports a near-critical hit
// (|f^k(x)| < critical_tol) which signals a (pre)periodic critical point
// when x is on the critical orbit.
template <class R, class M>
PointReturn<R> first_return(const M& f, R x, const R& p, int max_time, const R& critical_tol) {
    PointReturn<R> out;
    int orient = 1;
    for (int k = 1; k <= max_time; ++k) {
        if (f.deriv(x) < 0) orient = -orient;
        x = f(x);
        if (abs(x) < critical_tol) {
            out.event = ReturnEvent::CriticalHit;
            out.time = k;
            out.value = x;
            out.orientation = orient;
            return out;
        }
        if (abs(x) <= p) {
            out.event = ReturnEvent::Returned;
            out.time = k;
            out.value = x;
            out.orientation = orient;
            return out;
        }
    }
    out.event = ReturnEvent::Escaped;
    out.time = max_time;
    out.value = x;
    return out;
}

// ---------------------------------------------------------------------------
// Principal nest

enum class NestStop {
    None,
    DepthCap,
    WidthCap,            // level width fell below the configured floor
    Renormalization,     // central cascade of constant return time
    PeriodicCritical,
    Escaped,             // critical orbit failed to return within budget
    PrecisionExhausted,
};

template <class R> struct LevelT {
    R p{};            // I_i = [-p, p]
    int m = 0;        // return time of the central domain (= of the critical point)
    R rv{};           // R_i(0) = f^m(0)
    bool central = false;
    int rv_orient = 1; // orientation of the branch carrying 0's return
    R p_next{};        // radius of the central domain I_{i+1}
};

template <class R> struct BasicNest {
    std::vector<LevelT<R>> levels; // levels[0] is I_1 (of the working map f^B)
    NestStop stop = NestStop::None;
    int cascade_level = -1;   // first level of a detected cascade (0-based)
    int cascade_period = 0;   // in working-map iterates
    int renorm_period = 1;    // B: the working map is f^B after descents
    int descents = 0;

    int depth() const { return int(levels.size()); }
    const LevelT<R>& level(int i1) const { return levels.at(std::size_t(i1 - 1)); } // 1-based
};

struct NestOptions {
    int max_depth = 24;
    double min_width = 1e-12;
    int max_return_time = 1 << 20;
    double periodic_tol = 1e-12;
    int cascade_k = 40;
    bool stop_on_cascade = true;
    int max_descents = 24;
};

// Runtime-iterated map F = f^B: the working map after a renormalization
// descent (the paper's passage to the return map of a restrictive interval).
template <class M, class R> struct IterMap {
    M f;
    int B = 1;

    R operator()(R x) const {
        for (int i = 0; i < B; ++i) x = f(x);
        return x;
    }
    R deriv(R x) const {
        R d(1);
        for (int i = 0; i < B; ++i) {
            d *= f.deriv(x);
            x = f(x);
        }
        return d;
    }
};

// Orientation-reversing fixed point (Df < 0) of f inside [lo, hi]; returns
// its absolute value (the symmetric interval radius).
template <class R, class M>
R reversing_fixed_point(const M& f, R lo = R(-1), R hi = R(1), int grid = 4096) {
    R best{};
    bool found = false;
    R prev_x = lo;
    R prev_g = f(prev_x) - prev_x;
    for (int i = 1; i <= grid; ++i) {
        R x = lo + (hi - lo) * R(i) / R(grid);
        R g = f(x) - x;
        if ((g <= R(0) && prev_g >= R(0)) || (g >= R(0) && prev_g <= R(0))) {
            R root = monotone_solve([&](R t) { return f(t) - t; }, prev_x, x, R(0));
            if (f.deriv(root) < R(0)) {
                best = root;
                found = true;
            }
        }
        prev_x = x;
        prev_g = g;
    }
    if (!found)
        raise(Errc::NoReversingFixedPoint, "no orientation-reversing fixed point (tau too small?)");
    return abs(best);
}

// Pull [-p,p] back along the critical orbit prefix x_1..x_m (x_m is the first
// return) and intersect with the fold at 0: returns the central-domain radius
// p_{i+1}.  Each pullback step is a monotone bisection on one side of 0.
template <class R, class M>
R central_domain_radius(const M& f, const std::vector<R>& orbit, const R& p, int m) {
    Interval<R> J{-p, p};
    for (int k = m - 1; k >= 1; --k) {
        R xk = orbit[std::size_t(k)];
        R side_lo, side_hi;
        if (xk > R(0)) {
            side_lo = R(0);
            side_hi = R(1);
        } else {
            side_lo = R(-1);
            side_hi = R(0);
        }
        auto g = [&](R t) { return f(t); };
        // f is even with max f(0): on each side it is strictly monotone.
        R v0 = f(side_lo), v1 = f(side_hi);
        R fmin = std::min(v0, v1), fmax = std::max(v0, v1);
        R tlo = std::max(J.lo, fmin);
        R thi = std::min(J.hi, fmax);
        if (!(tlo < thi)) raise(Errc::PrecisionExhausted, "degenerate pullback target");
        R a = monotone_solve(g, side_lo, side_hi, tlo);
        R b = monotone_solve(g, side_lo, side_hi, thi);
        J.lo = std::min(a, b);
        J.hi = std::max(a, b);
        if (!(J.lo <= xk && xk <= J.hi)) {
            // tolerate roundoff at the ends
            R w = J.width();
            if (xk < J.lo - w || xk > J.hi + w)
                raise(Errc::PrecisionExhausted, "pullback lost the orbit point");
        }
    }
    // fold: p_next solves f(xi) = J.lo on (0, 1]; f(0) = x_1 lies in J.
    R x1 = orbit[1];
    if (!(x1 >= J.lo && x1 <= J.hi))
        raise(Errc::PrecisionExhausted, "critical value left the pullback interval");
    return monotone_solve([&](R t) { return f(t); }, R(0), R(1), J.lo);
}

template <class R, class M> class NestBuilder {
  public:
    using Working = IterMap<M, R>;

    NestBuilder(M f, NestOptions opts) : f_{std::move(f), 1}, opts_(opts) {
        orbit_.push_back(R(0));
    }

    // The cached orbit is always the base-map orbit of 0; working-map (f^B)
    // quantities read it at stride B.  The base map is monotone on each side
    // of 0, which the interval pullback needs; f^B is not.
    void extend_orbit(std::size_t n) {
        while (orbit_.size() <= n) orbit_.push_back(f_.f(orbit_.back()));
    }

    BasicNest<R> build() {
        BasicNest<R> nest;
        R crit_tol = real_traits<R>::is_big ? R(1e-24) : R(opts_.periodic_tol);
        R search_lo = R(-1), search_hi = R(1);

        while (true) { // descent loop: restarts with the return map f^B
            R p;
            try {
                p = reversing_fixed_point<R>(f_, search_lo, search_hi);
            } catch (const Error&) {
                nest.stop = NestStop::Escaped;
                finish(nest);
                return nest;
            }
            nest.levels.clear();
            int central_run = 0, central_run_m = 0;
            bool descended = false;
            const int B = f_.B;

            while (int(nest.levels.size()) < opts_.max_depth) {
                LevelT<R> lev;
                lev.p = p;
                int m = -1;
                long long max_k = std::max<long long>(1, opts_.max_return_time / B);
                for (long long k = 1; k <= max_k; ++k) {
                    std::size_t j = std::size_t(k) * std::size_t(B);
                    extend_orbit(j);
                    R xk = orbit_[j];
                    if (abs(xk) < crit_tol) {
                        nest.stop = confirm_critical_hit(int(k)) ? NestStop::PeriodicCritical
                                                                 : NestStop::PrecisionExhausted;
                        finish(nest);
                        return nest;
                    }
                    if (abs(xk) <= p) {
                        m = int(k);
                        break;
                    }
                    if ((k & (k - 1)) == 0 && k >= 64 && pinned_repelling(k, crit_tol)) {
                        nest.stop = NestStop::PeriodicCritical;
                        finish(nest);
                        return nest;
                    }
                }
                if (m < 0) {
                    nest.stop = NestStop::Escaped;
                    finish(nest);
                    return nest;
                }
                lev.m = m;
                lev.rv = orbit_[std::size_t(m) * std::size_t(B)];
                int orient = 1;
                for (std::size_t j = 1; j < std::size_t(m) * std::size_t(B); ++j)
                    if (f_.f.deriv(orbit_[j]) < R(0)) orient = -orient;
                lev.rv_orient = orient;

                R p_next;
                try {
                    p_next = central_domain_radius(f_.f, orbit_, p, m * B);
                } catch (const Error&) {
                    nest.stop = NestStop::PrecisionExhausted;
                    nest.levels.push_back(lev);
                    finish(nest);
                    return nest;
                }
                if (p_next > p * (R(1) - R(1e-9))) {
                    // the whole of I_i returns at time m: [-p,p] is a
                    // restrictive interval; descend to its return map
                    if (descents_ >= opts_.max_descents || (long long)m * B > (1 << 16)) {
                        nest.stop = NestStop::Renormalization;
                        finish(nest);
                        return nest;
                    }
                    ++descents_;
                    f_.B *= m;
                    search_lo = -p * (R(1) - R(1e-12));
                    search_hi = p * (R(1) - R(1e-12));
                    descended = true;
                    break;
                }
                if (!(p_next > R(0))) {
                    nest.stop = NestStop::PrecisionExhausted;
                    nest.levels.push_back(lev);
                    finish(nest);
                    return nest;
                }
                lev.central = abs(lev.rv) <= p_next;
                lev.p_next = p_next;
                nest.levels.push_back(lev);

                if (lev.central && (central_run == 0 || central_run_m == m)) {
                    central_run_m = m;
                    ++central_run;
                } else {
                    central_run = lev.central ? 1 : 0;
                    central_run_m = m;
                }
                if (central_run >= opts_.cascade_k) {
                    nest.cascade_level = int(nest.levels.size()) - central_run;
                    nest.cascade_period = central_run_m;
                    if (opts_.stop_on_cascade) {
                        nest.stop = NestStop::Renormalization;
                        finish(nest);
                        return nest;
                    }
                }
                if (2 * to_double(p_next) < opts_.min_width) {
                    nest.stop = NestStop::WidthCap;
                    finish(nest);
                    return nest;
                }
                p = p_next;
            }
            if (descended) continue;
            nest.stop = NestStop::DepthCap;
            finish(nest);
            return nest;
        }
    }

    const Working& map() const { return f_; }
    const std::vector<R>& orbit() const { return orbit_; }

  private:
    void finish(BasicNest<R>& nest) const {
        nest.renorm_period = f_.B;
        nest.descents = descents_;
    }

    // Pinned repelling cycle in the working-map orbit tail: the critical
    // orbit is exactly (pre)periodic within tolerance.  Attracting
    // near-repeats (an orbit converging to a cycle) are excluded by the
    // multiplier test.
    bool pinned_repelling(long long k, const R& tol) const {
        const int B = f_.B;
        auto at = [&](long long i) { return orbit_[std::size_t(i) * std::size_t(B)]; };
        long long pmax = std::min<long long>(64, k / 16);
        for (long long per = 1; per <= pmax; ++per) {
            bool pinned = true;
            for (int j = 1; j <= 8; ++j) {
                if (abs(at(k - j * per) - at(k)) > tol) {
                    pinned = false;
                    break;
                }
            }
            if (!pinned) continue;
            R mult(1);
            for (long long j = 0; j < per; ++j) mult *= f_.deriv(at(k - j));
            if (abs(mult) >= R(1) + R(1e-9)) return true;
        }
        return false;
    }

    // Re-verify a near-critical hit at higher precision; rounding artifacts
    // from the orbit iteration must not trigger PeriodicCritical.
    bool confirm_critical_hit(int k) const {
        if (k * f_.B > 408) return false; // beyond the reliable horizon
        if constexpr (real_traits<R>::is_big) {
            return true; // BigFloat orbit is the verification path already
        } else if constexpr (std::is_same_v<M, RealMap<double>>) {
            RealMap<BigFloat> fb;
            fb.tau = BigFloat(f_.f.tau);
            fb.has_w = f_.f.has_w;
            fb.w = f_.f.w;
            fb.lambda = BigFloat(f_.f.lambda);
            BigFloat x(0);
            for (int i = 0; i < k * f_.B; ++i) x = fb(x);
            return abs(x) < BigFloat(opts_.periodic_tol);
        } else {
            return true;
        }
    }

    Working f_;
    NestOptions opts_;
    std::vector<R> orbit_;
    int descents_ = 0;
};

template <class R, class M> BasicNest<R> build_basic_nest(const M& f, const NestOptions& opts) {
    NestBuilder<R, M> b(f, opts);
    return b.build();
}

// The working map of a built nest: f^B after renormalization descents.
template <class R, class M> IterMap<M, R> working_map(const M& f, const BasicNest<R>& nest) {
    return IterMap<M, R>{f, nest.renorm_period};
}

// ---------------------------------------------------------------------------
// Return-domain enumeration (worklist of monotone pieces)

template <class R> struct DomainT {
    R a{}, b{};          // the domain interval
    int m = 0;           // return time
    bool central = false;
    int index = 0;       // positional index; 0 = central, +-j outward
    R fa{}, fb{};        // f^m(a), f^m(b)
    bool clipped = false; // touches the enumeration window edge
    int orientation = 1;  // +1 if f^m increasing on [a,b]
};

struct EnumOptions {
    int max_domains = 512;
    int max_return_time = 4096; // domains of deeper return time are left as gaps
    double width_floor_rel = 1e-3; // relative to |I_i| = 2p; 0 = resolution floor only
    int max_pieces = 1 << 18;
};

template <class R> struct DomainEnumeration {
    std::vector<DomainT<R>> domains; // sorted by position
    bool truncated = false;          // pieces dropped below the width floor
    bool budget_exceeded = false;    // max_domains or max_pieces hit
    R gap_largest{};                 // widest unresolved piece (non-returning in budget)
};

namespace detail {

template <class R> struct Piece {
    R a, b;   // subinterval of the window
    R fa, fb; // f^k at the endpoints
    int k;
};

} // namespace detail

// Enumerate maximal intervals of constant first-return time to [-p, p] inside
// `window`.  Pieces are split at preimages of the boundary +-p (cut points);
// pieces containing a keep point are never dropped by the width floor.
template <class R, class M>
DomainEnumeration<R> enumerate_return_domains(const M& f, const R& p, Interval<R> window,
                                              const EnumOptions& opts,
                                              const std::vector<R>& keep_points = {}) {
    DomainEnumeration<R> out;
    out.gap_largest = R(0);
    if (!(window.lo < window.hi)) return out;
    window.lo = std::max(window.lo, -p);
    window.hi = std::min(window.hi, p);

    R floor_abs = R(opts.width_floor_rel) * (R(2) * p);
    R res_floor = machine_eps<R>() * p * R(64);
    if (floor_abs < res_floor) floor_abs = res_floor;

    auto keeps = [&](const R& a, const R& b) {
        for (const R& kp : keep_points)
            if (kp >= a && kp <= b) return true;
        return false;
    };

    auto fk_at = [&](R x, int k) {
        for (int i = 0; i < k; ++i) x = f(x);
        return x;
    };

    std::vector<detail::Piece<R>> work;
    auto push_initial = [&](R a, R b) {
        if (!(a < b)) return;
        work.push_back({a, b, f(a), f(b), 1});
    };
    if (window.lo < R(0) && window.hi > R(0)) {
        push_initial(window.lo, R(0));
        push_initial(R(0), window.hi);
    } else {
        push_initial(window.lo, window.hi);
    }

    std::vector<DomainT<R>> found;
    int pieces_seen = 0;
    while (!work.empty()) {
        if (++pieces_seen > opts.max_pieces) {
            out.budget_exceeded = true;
            break;
        }
        if (int(found.size()) >= opts.max_domains) {
            out.budget_exceeded = true;
            break;
        }
        detail::Piece<R> pc = work.back();
        work.pop_back();

        R lo_img = std::min(pc.fa, pc.fb), hi_img = std::max(pc.fa, pc.fb);
        if (lo_img >= -p && hi_img <= p) {
            DomainT<R> d;
            d.a = pc.a;
            d.b = pc.b;
            d.m = pc.k;
            d.fa = pc.fa;
            d.fb = pc.fb;
            d.orientation = pc.fb >= pc.fa ? 1 : -1;
            d.clipped = (pc.a == window.lo && window.lo > -p) || (pc.b == window.hi && window.hi < p);
            found.push_back(d);
            continue;
        }
        if (hi_img <= -p || lo_img >= p) {
            // still traveling outside int I_i
            if (pc.k >= opts.max_return_time) {
                out.gap_largest = std::max(out.gap_largest, pc.b - pc.a);
                continue;
            }
            if (pc.b - pc.a < floor_abs && !keeps(pc.a, pc.b)) {
                out.truncated = true;
                continue;
            }
            // the image interval avoids (-p,p) which contains 0, so f stays monotone
            work.push_back({pc.a, pc.b, f(pc.fa), f(pc.fb), pc.k + 1});
            continue;
        }
        // partial overlap: cut at preimages of the crossed boundaries
        bool inc = pc.fb >= pc.fa;
        auto g = [&](R x) { return fk_at(x, pc.k); };
        std::vector<R> cuts;
        for (R boundary : {-p, p}) {
            if (lo_img < boundary && boundary < hi_img)
                cuts.push_back(monotone_solve(g, pc.a, pc.b, boundary));
        }
        std::sort(cuts.begin(), cuts.end());
        R prev = pc.a;
        R prev_img = pc.fa;
        cuts.push_back(pc.b);
        for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
            R cut = cuts[ci];
            if (!(cut > prev)) continue;
            R cut_img = (ci + 1 == cuts.size()) ? pc.fb : fk_at(cut, pc.k);
            work.push_back({prev, cut, prev_img, cut_img, pc.k});
            prev = cut;
            prev_img = cut_img;
        }
        (void)inc;
    }

    std::sort(found.begin(), found.end(),
              [](const DomainT<R>& x, const DomainT<R>& y) { return x.a < y.a; });
    // merge the two central fold halves sharing the endpoint 0
    std::vector<DomainT<R>> merged;
    for (auto& d : found) {
        if (!merged.empty() && merged.back().b == d.a && merged.back().m == d.m &&
            d.a == R(0)) {
            merged.back().b = d.b;
            merged.back().fb = d.fb;
            merged.back().central = true;
        } else {
            merged.push_back(d);
        }
    }
    int central_at = -1;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (merged[i].a <= R(0) && merged[i].b >= R(0)) {
            merged[i].central = true;
            central_at = int(i);
        }
    }
    if (central_at >= 0) {
        for (std::size_t i = 0; i < merged.size(); ++i)
            merged[i].index = int(i) - central_at;
    } else {
        // window on one side: indices relative to the window (caller resolves)
        bool right = merged.empty() ? (window.lo >= R(0)) : (merged.front().a >= R(0));
        for (std::size_t i = 0; i < merged.size(); ++i)
            merged[i].index = right ? int(i) + 1 : -int(merged.size() - i);
    }
    out.domains = std::move(merged);
    return out;
}

// Preimage of [t.lo, t.hi] under the monotone branch f^m|[d.a, d.b].
template <class R, class M>
Interval<R> branch_pullback(const M& f, const DomainT<R>& d, const Interval<R>& t) {
    auto g = [&](R x) {
        for (int i = 0; i < d.m; ++i) x = f(x);
        return x;
    };
    R lo_img = std::min(d.fa, d.fb), hi_img = std::max(d.fa, d.fb);
    R tlo = std::max(t.lo, lo_img), thi = std::min(t.hi, hi_img);
    if (!(tlo <= thi)) raise(Errc::AddressUnresolvable, "pullback target misses branch image");
    R x1 = monotone_solve(g, d.a, d.b, tlo);
    R x2 = monotone_solve(g, d.a, d.b, thi);
    return {std::min(x1, x2), std::max(x1, x2)};
}

// ---------------------------------------------------------------------------
// First landing decomposition

template <class R> struct LandingT {
    R a{}, b{};
    std::vector<int> itinerary; // positional indices j_1..j_k, all nonzero
    int time = 0;               // total iterate count to land in I_{i+1}
};

template <class R> struct LandingEnumeration {
    std::vector<LandingT<R>> pieces; // includes the empty itinerary = I_{i+1}
    bool budget_exceeded = false;
};

struct LandingOptions {
    int max_itinerary = 6;
    int max_pieces = 4096;
    double width_floor_rel = 0.0;
};

// Landing pieces C^d of the first landing map from I_i to I_{i+1}, built by
// pulling I_{i+1} back through chains of lateral return branches.
template <class R, class M>
LandingEnumeration<R> enumerate_landing(const M& f, const R& p_i, const R& p_next,
                                        const std::vector<DomainT<R>>& domains,
                                        const LandingOptions& opts) {
    LandingEnumeration<R> out;
    LandingT<R> base;
    base.a = -p_next;
    base.b = p_next;
    base.time = 0;
    out.pieces.push_back(base);

    R floor_abs = R(opts.width_floor_rel) * (R(2) * p_i);

    struct Item {
        Interval<R> iv;
        std::vector<int> itin;
        int time;
    };
    std::vector<Item> frontier;
    frontier.push_back({{-p_next, p_next}, {}, 0});
    for (int len = 1; len <= opts.max_itinerary; ++len) {
        std::vector<Item> next;
        for (const auto& d : domains) {
            if (d.central || d.clipped) continue;
            for (const auto& it : frontier) {
                if (int(out.pieces.size()) >= opts.max_pieces) {
                    out.budget_exceeded = true;
                    return out;
                }
                Interval<R> pre;
                try {
                    pre = branch_pullback(f, d, it.iv);
                } catch (const Error&) {
                    continue;
                }
                if (pre.width() < floor_abs) continue;
                std::vector<int> itin;
                itin.reserve(it.itin.size() + 1);
                itin.push_back(d.index);
                itin.insert(itin.end(), it.itin.begin(), it.itin.end());
                LandingT<R> piece;
                piece.a = pre.lo;
                piece.b = pre.hi;
                piece.itinerary = itin;
                piece.time = d.m + it.time;
                out.pieces.push_back(piece);
                next.push_back({pre, itin, piece.time});
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return out;
}

// Preimage of `target` under the central fold f^m | [-p_next, p_next].
// Returns the component containing 0 when f^m(0) lies in the target,
// otherwise a symmetric pair of lateral components (possibly empty).
template <class R, class M>
std::vector<Interval<R>> fold_pullback(const M& f, const R& p_next, int m, const R& v,
                                       const Interval<R>& target) {
    auto g = [&](R x) {
        for (int i = 0; i < m; ++i) x = f(x);
        return x;
    };
    R gend = g(p_next); // = +-p_i up to roundoff
    R lo_img = std::min(v, gend), hi_img = std::max(v, gend);
    R tlo = std::max(target.lo, lo_img), thi = std::min(target.hi, hi_img);
    std::vector<Interval<R>> out;
    if (!(tlo <= thi)) return out;
    R x1 = monotone_solve(g, R(0), p_next, tlo);
    R x2 = monotone_solve(g, R(0), p_next, thi);
    R a = std::min(x1, x2), b = std::max(x1, x2);
    if (v >= target.lo && v <= target.hi) {
        // g(0)=v inside the target: the component of 0 is [-b, b]
        out.push_back({-b, b});
    } else {
        out.push_back({a, b});
        out.push_back({-b, -a});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Point queries

// Landing walk of a point y in I_i toward I_{i+1}: records for each return
// step the cheap branch invariant (side, return time, orientation).
struct HopInvariant {
    int side = 0;   // sign of the point
    int m = 0;      // its first-return time
    int orient = 0; // branch orientation at the point
    bool operator==(const HopInvariant& o) const = default;
};

template <class R> struct LandingWalk {
    std::vector<HopInvariant> hops;
    bool landed = false;
    R final_value{};
};

template <class R, class M>
LandingWalk<R> landing_walk(const M& f, R y, const R& p_i, const R& p_next, int max_hops,
                            int max_return_time) {
    LandingWalk<R> out;
    for (int h = 0; h < max_hops; ++h) {
        if (abs(y) <= p_next) {
            out.landed = true;
            out.final_value = y;
            return out;
        }
        PointReturn<R> r = first_return(f, y, p_i, max_return_time, machine_eps<R>() * R(4));
        if (r.event != ReturnEvent::Returned) {
            out.final_value = y;
            return out; // not landed (escape/critical degenerate)
        }
        out.hops.push_back({y > R(0) ? 1 : -1, r.time, r.orientation});
        y = r.value;
    }
    out.final_value = y;
    return out;
}

template <class R> struct PointIndex {
    int index = 0; // positional index of the domain containing the point
    DomainT<R> domain;
};

// Positional index of the return domain containing x at a level with radius p
// and central radius p_next: enumerate the side window between the central
// domain and x (no width floor, so every resolvable intervening domain is
// counted) and count full domains strictly between.
template <class R, class M>
PointIndex<R> point_domain_index(const M& f, const R& p, const R& p_next, const R& x,
                                 EnumOptions opts) {
    if (abs(x) <= p_next) {
        PointIndex<R> out;
        out.index = 0;
        out.domain.a = -p_next;
        out.domain.b = p_next;
        out.domain.central = true;
        return out;
    }
    if (abs(x) > p) raise(Errc::AddressUnresolvable, "point outside the level interval");
    opts.width_floor_rel = 0.0;
    int side = x > R(0) ? 1 : -1;
    Interval<R> window = side > 0 ? Interval<R>{p_next, p} : Interval<R>{-p, -p_next};
    DomainEnumeration<R> en = enumerate_return_domains(f, p, window, opts, {x});
    const DomainT<R>* hit = nullptr;
    for (const auto& d : en.domains)
        if (x >= d.a && x <= d.b) {
            hit = &d;
            break;
        }
    if (!hit) raise(Errc::AddressUnresolvable, "point not inside a resolvable return domain");
    int between = 0;
    for (const auto& d : en.domains) {
        if (&d == hit || d.clipped) continue;
        bool is_between = side > 0 ? (d.b < hit->a) : (d.a > hit->b);
        if (is_between) ++between;
    }
    PointIndex<R> out;
    out.index = side * (between + 1);
    out.domain = *hit;
    out.domain.index = out.index;
    return out;
}

} // namespace nestlab::engine
