#include "nestlab/nest.hpp"

#include <algorithm>
#include <cmath>

namespace nestlab {

const char* termination_name(NestTermination t) {
    switch (t) {
        case NestTermination::DepthCap: return "depth-cap";
        case NestTermination::WidthCap: return "width-cap";
        case NestTermination::Renormalization: return "renormalization-detected";
        case NestTermination::PeriodicCritical: return "periodic-critical-point";
        case NestTermination::Escaped: return "escaped";
        case NestTermination::PrecisionExhausted: return "precision-exhausted";
    }
    return "unknown";
}

namespace {

NestTermination from_stop(engine::NestStop s) {
    using engine::NestStop;
    switch (s) {
        case NestStop::DepthCap: return NestTermination::DepthCap;
        case NestStop::WidthCap: return NestTermination::WidthCap;
        case NestStop::Renormalization: return NestTermination::Renormalization;
        case NestStop::PeriodicCritical: return NestTermination::PeriodicCritical;
        case NestStop::Escaped: return NestTermination::Escaped;
        case NestStop::PrecisionExhausted:
        case NestStop::None: return NestTermination::PrecisionExhausted;
    }
    return NestTermination::PrecisionExhausted;
}

template <class R>
void fill_levels(PrincipalNest& out, const engine::BasicNest<R>& bn, const RealMap<R>& f,
                 const NestBudget& budget) {
    out.levels.clear();
    out.renorm_period = bn.renorm_period;
    out.descents = bn.descents;
    auto F = engine::working_map(f, bn);
    for (const auto& lv : bn.levels) {
        NestLevel pub;
        pub.p = to_double(lv.p);
        pub.central_return = lv.central;
        pub.central_return_time = lv.m * bn.renorm_period;
        pub.return_value = to_double(lv.rv);
        pub.p_next = to_double(lv.p_next);
        if (lv.central) {
            pub.tau_index = 0;
            pub.tau_resolved = true;
        } else if (budget.resolve_tau && lv.p_next > R(0)) {
            engine::EnumOptions eo;
            eo.max_domains = budget.index_budget;
            try {
                auto pi = engine::point_domain_index(F, lv.p, lv.p_next, lv.rv, eo);
                pub.tau_index = pi.index;
                pub.tau_resolved = true;
            } catch (const Error&) {
                pub.tau_resolved = false;
            }
        }
        out.levels.push_back(pub);
    }
}

engine::NestOptions to_engine(const NestBudget& b, double min_width) {
    engine::NestOptions o;
    o.max_depth = b.max_depth;
    o.min_width = min_width;
    o.max_return_time = b.max_return_time;
    o.cascade_k = b.cascade_k;
    return o;
}

} // namespace

double reversing_fixed_point(const MapFamily& f) {
    auto m = real_map<double>(f);
    return engine::reversing_fixed_point<double>(m);
}

PrincipalNest build_nest(const MapFamily& f, const NestBudget& budget) {
    PrincipalNest out{f};
    bool want_high = budget.precision == Precision::High;
    if (!want_high) {
        auto md = real_map<double>(f);
        double floor_d = std::max(budget.min_width, kHighPrecisionWidth);
        auto bn = engine::build_basic_nest<double>(md, to_engine(budget, floor_d));
        bool widths_exhausted =
            (bn.stop == engine::NestStop::WidthCap || bn.stop == engine::NestStop::PrecisionExhausted) &&
            budget.min_width < kHighPrecisionWidth;
        if (budget.precision == Precision::Auto && widths_exhausted) {
            want_high = true; // hand over to BigFloat below 1e-12
        } else {
            out.termination = from_stop(bn.stop);
            fill_levels(out, bn, md, budget);
            out.basic_d = std::move(bn);
            return out;
        }
    }
    auto mb = real_map<BigFloat>(f);
    double floor_b = std::max(budget.min_width, kMinWidthHighPrecision);
    auto bn = engine::build_basic_nest<BigFloat>(mb, to_engine(budget, floor_b));
    out.termination = from_stop(bn.stop);
    out.high_precision = true;
    fill_levels(out, bn, mb, budget);
    out.basic_b = std::move(bn);
    return out;
}

void require_depth(const PrincipalNest& nest, int depth) {
    if (nest.depth() >= depth) return;
    switch (nest.termination) {
        case NestTermination::PeriodicCritical:
            raise(Errc::PeriodicCritical, "nest stopped: (pre)periodic critical point");
        case NestTermination::Escaped:
            raise(Errc::EscapedNest, "nest stopped: critical orbit did not return in budget");
        case NestTermination::PrecisionExhausted:
            raise(Errc::PrecisionExhausted, "nest stopped: precision exhausted");
        default:
            raise(Errc::InsufficientLevels,
                  "nest has " + std::to_string(nest.depth()) + " levels, need " +
                      std::to_string(depth));
    }
}

namespace {

template <class R>
std::vector<ReturnDomain> domains_at(const PrincipalNest& nest, const engine::BasicNest<R>& bn,
                                     int level, double wlo, double whi, int max_domains,
                                     double floor_rel) {
    if (level < 1 || level > int(bn.levels.size()))
        raise(Errc::InsufficientLevels, "no such nest level");
    const auto& lv = bn.levels[std::size_t(level - 1)];
    auto f = engine::working_map(real_map<R>(nest.family), bn);
    engine::EnumOptions eo;
    eo.max_domains = max_domains;
    eo.width_floor_rel = floor_rel;
    engine::Interval<R> window{R(wlo), R(whi)};
    std::vector<R> keep;
    keep.push_back(lv.rv);
    auto en = engine::enumerate_return_domains(f, lv.p, window, eo, keep);
    if (en.budget_exceeded)
        raise(Errc::BudgetExceeded, "return-domain budget exhausted (remaining domains unreported)");
    std::vector<ReturnDomain> out;
    for (const auto& d : en.domains) {
        ReturnDomain rd;
        rd.a = to_double(d.a);
        rd.b = to_double(d.b);
        rd.index = d.index;
        rd.return_time = d.m * bn.renorm_period; // f-iterates
        rd.image_a = to_double(d.fa);
        rd.image_b = to_double(d.fb);
        rd.clipped = d.clipped;
        out.push_back(rd);
    }
    return out;
}

template <class R>
std::vector<ReturnDomain> landings_at(const PrincipalNest& nest, const engine::BasicNest<R>& bn,
                                      int level, int max_len, int max_pieces) {
    if (level < 1 || level > int(bn.levels.size()))
        raise(Errc::InsufficientLevels, "no such nest level");
    const auto& lv = bn.levels[std::size_t(level - 1)];
    if (!(lv.p_next > R(0)))
        raise(Errc::InsufficientLevels, "central domain of this level was not computed");
    auto f = engine::working_map(real_map<R>(nest.family), bn);
    engine::EnumOptions eo;
    auto en = engine::enumerate_return_domains(f, lv.p, {-lv.p, lv.p}, eo, {lv.rv});
    engine::LandingOptions lo;
    lo.max_itinerary = max_len;
    lo.max_pieces = max_pieces;
    auto land = engine::enumerate_landing(f, lv.p, lv.p_next, en.domains, lo);
    if (land.budget_exceeded) raise(Errc::BudgetExceeded, "landing budget exhausted");
    std::vector<ReturnDomain> out;
    for (const auto& c : land.pieces) {
        ReturnDomain rd;
        rd.a = to_double(c.a);
        rd.b = to_double(c.b);
        rd.return_time = c.time * bn.renorm_period; // f-iterates
        rd.itinerary.entries = c.itinerary;
        rd.index = c.itinerary.empty() ? 0 : c.itinerary.front();
        out.push_back(rd);
    }
    std::sort(out.begin(), out.end(), [](const ReturnDomain& x, const ReturnDomain& y) {
        return x.a < y.a;
    });
    return out;
}

} // namespace

std::vector<ReturnDomain> return_domains(const PrincipalNest& nest, int level, double window_lo,
                                         double window_hi, int max_domains,
                                         double width_floor_rel) {
    if (nest.basic_b)
        return domains_at(nest, *nest.basic_b, level, window_lo, window_hi, max_domains,
                          width_floor_rel);
    return domains_at(nest, *nest.basic_d, level, window_lo, window_hi, max_domains,
                      width_floor_rel);
}

std::vector<ReturnDomain> landing_domains(const PrincipalNest& nest, int level,
                                          int max_itinerary_length, int max_pieces) {
    if (nest.basic_b) return landings_at(nest, *nest.basic_b, level, max_itinerary_length, max_pieces);
    return landings_at(nest, *nest.basic_d, level, max_itinerary_length, max_pieces);
}

std::vector<int> PrincipalNest::non_central_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (!levels[i].central_return) out.push_back(int(i) + 1);
    return out;
}

std::vector<std::pair<int, double>> scaling_ratios(const PrincipalNest& nest) {
    std::vector<int> nc = nest.non_central_indices();
    // a ratio needs I_{n_k+1}, i.e. level n_k must have its central domain
    std::vector<std::pair<int, double>> out;
    int k = 0;
    for (int i : nc) {
        const NestLevel& lv = nest.levels[std::size_t(i - 1)];
        if (!(lv.p_next > 0)) continue;
        ++k;
        out.emplace_back(k, lv.p_next / lv.p);
    }
    if (out.size() < 2)
        raise(Errc::InsufficientLevels, "need >= 2 non-central levels for scaling ratios");
    return out;
}

RenormalizationVerdict detect_renormalization(const PrincipalNest& nest, int K_central) {
    RenormalizationVerdict v;
    if (K_central < 1) raise(Errc::OutOfRange, "K_central must be positive");
    int run = 0, run_m = 0, run_start = 0;
    for (std::size_t i = 0; i < nest.levels.size(); ++i) {
        const NestLevel& lv = nest.levels[i];
        if (lv.central_return && (run == 0 || lv.central_return_time == run_m)) {
            if (run == 0) {
                run_start = int(i) + 1;
                run_m = lv.central_return_time;
            }
            ++run;
        } else if (lv.central_return) {
            run_start = int(i) + 1;
            run_m = lv.central_return_time;
            run = 1;
        } else {
            run = 0;
        }
        if (run >= K_central) {
            v.detected = true;
            v.level = run_start;
            v.period = run_m;
            return v;
        }
    }
    return v;
}

} // namespace nestlab
