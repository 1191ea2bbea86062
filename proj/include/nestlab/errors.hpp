#pragma once

#include <stdexcept>
#include <string>

namespace nestlab {

// Typed computational errors. Verdict-style results (classification,
// renormalization detection, nest termination) are returned as values,
// not thrown.
enum class Errc {
    DomainError,
    SingularAtCritical,
    NotUnimodal,
    NotSymmetric,
    NoReversingFixedPoint,
    PeriodicCritical,
    EscapedNest,
    PrecisionExhausted,
    BudgetExceeded,
    InsufficientLevels,
    CriticalHit,
    NotInF,
    AddressUnresolvable,
    MonotonicityViolation,
    InsufficientRows,
    EmptyInterval,
    OutOfRange,
    DegenerateInterval,
    NotNested,
    GridTooCoarse,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace nestlab
