#pragma once

// Principal nest of a real even unimodal map: the nested symmetric intervals
// I_1 ⊃ I_2 ⊃ ... where I_{i+1} is the central domain of the first return
// map to I_i, together with return/landing decompositions, central-return
// bookkeeping and cascade (renormalization) detection.
//
// I_1 is taken from the orientation-reversing fixed point of f itself; for
// renormalizable maps the builder terminates with a Renormalization reason
// (central cascade) instead of restarting from the restrictive interval.

#include <optional>
#include <utility>
#include <vector>

#include "nestlab/engine.hpp"
#include "nestlab/maps.hpp"

namespace nestlab {

// Finite landing itinerary: non-zero positional branch indices.
struct Itinerary {
    std::vector<int> entries;
};

// A component of the first-return (or first-landing) decomposition.
// For landing pieces, return_time is the landing time; the empty-itinerary
// piece C^0 = I_{i+1} carries time 0 (identity branch).
struct ReturnDomain {
    double a = 0, b = 0;
    int index = 0; // 0 iff the domain contains 0
    int return_time = 0;
    Itinerary itinerary;
    double image_a = 0, image_b = 0; // f^m at the endpoints
    bool clipped = false;            // cut by the enumeration window
};

struct NestLevel {
    double p = 0;           // I_i = [-p_i, p_i]
    bool central_return = false;
    int tau_index = 0;      // positional index of the domain containing R_i(0)
    bool tau_resolved = false;
    int central_return_time = 0; // m_i, in f-iterates (= working-map time * B)
    double return_value = 0;     // R_i(0)
    double p_next = 0;           // radius of I_{i+1}
};

enum class NestTermination {
    DepthCap,
    WidthCap,
    Renormalization,
    PeriodicCritical,
    Escaped,
    PrecisionExhausted,
};

const char* termination_name(NestTermination t);

struct NestBudget {
    int max_depth = 24;
    double min_width = 1e-12; // |I_i| floor; values below 1e-12 engage BigFloat
    int max_return_time = 1 << 20;
    Precision precision = Precision::Auto;
    int cascade_k = 40;
    int index_budget = 512; // domain budget for positional tau indices
    bool resolve_tau = true;
};

struct PrincipalNest {
    MapFamily family;
    std::vector<NestLevel> levels;
    NestTermination termination = NestTermination::DepthCap;
    bool high_precision = false;
    // The nest is built for f^B, the return map reached after descending
    // through detected restrictive intervals (B=1: no renormalization found).
    int renorm_period = 1;
    int descents = 0;

    // 1-based indices of the non-central levels (the paper counts these as
    // n_k - 1; this list holds the levels themselves).
    std::vector<int> non_central_indices() const;
    int depth() const { return int(levels.size()); }

    // precision-matched engine data for downstream modules
    std::optional<engine::BasicNest<double>> basic_d;
    std::optional<engine::BasicNest<BigFloat>> basic_b;
};

double reversing_fixed_point(const MapFamily& f);

PrincipalNest build_nest(const MapFamily& f, const NestBudget& budget = {});

// Raises the termination reason as a typed error unless the nest reached
// `depth` levels.
void require_depth(const PrincipalNest& nest, int depth);

std::vector<ReturnDomain> return_domains(const PrincipalNest& nest, int level, double window_lo,
                                         double window_hi, int max_domains = 512,
                                         double width_floor_rel = 1e-3);

std::vector<ReturnDomain> landing_domains(const PrincipalNest& nest, int level,
                                          int max_itinerary_length, int max_pieces = 4096);

// (k, |I_{n_k+1}|/|I_{n_k}|) indexed by the non-central counter k (1-based).
std::vector<std::pair<int, double>> scaling_ratios(const PrincipalNest& nest);

struct RenormalizationVerdict {
    bool detected = false;
    int level = 0;  // 1-based first level of the cascade
    int period = 0; // constant central return time over the run
};

// Cascade signature of a restrictive interval: K consecutive central returns
// with constant central return time.  K=1 rejects on any central return and
// is documented as too aggressive; default 40.
RenormalizationVerdict detect_renormalization(const PrincipalNest& nest, int K_central = 40);

} // namespace nestlab
