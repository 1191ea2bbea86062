#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace nestlab {

// Software floating point for deep nest levels and deep parameter bisection.
// 256-bit significand: near-periodicity re-verification and 1e-28 parameter
// tolerances both need headroom against e^{Lambda k} error growth along
// chaotic orbits.
using BigFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

// Width below which binary64 nest/window computations hand over to BigFloat.
inline constexpr double kHighPrecisionWidth = 1e-12;

// Narrowest interval (or parameter window) the builders will subdivide in
// high-precision mode.
inline constexpr double kMinWidthHighPrecision = 1e-30;

enum class Precision {
    Auto,   // binary64, switching to BigFloat when widths drop below 1e-12
    Double, // binary64 only
    High,   // BigFloat throughout
};

inline double to_double(double x) { return x; }
inline double to_double(const BigFloat& x) { return x.convert_to<double>(); }

template <class R> struct real_traits;

template <> struct real_traits<double> {
    static constexpr bool is_big = false;
    static double from(double v) { return v; }
};

template <> struct real_traits<BigFloat> {
    static constexpr bool is_big = true;
    static BigFloat from(double v) { return BigFloat(v); }
};

} // namespace nestlab
