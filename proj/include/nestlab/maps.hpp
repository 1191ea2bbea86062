#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nestlab/bigfloat.hpp"
#include "nestlab/errors.hpp"

namespace nestlab {

using Complex = std::complex<double>;

// Dense polynomial in the monomial basis, used for perturbation fields w.
struct Polynomial {
    std::vector<double> c; // c[k] * x^k

    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c(std::move(coeffs)) {}

    template <class R> R value(R x) const {
        R acc(0);
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + R(c[k]);
        return acc;
    }
    template <class R> R deriv(R x) const {
        R acc(0);
        for (std::size_t k = c.size(); k-- > 1;) acc = acc * x + R(double(k) * c[k]);
        return acc;
    }

    Polynomial derivative() const;
    bool is_zero(double tol = 0.0) const;
    // Structurally odd: all even-degree coefficients vanish (to tol).
    bool is_odd(double tol = 1e-14) const;
    int degree() const { return c.empty() ? -1 : int(c.size()) - 1; }
    // sum_k |c_k|, a sup bound for |p| on [-1,1]
    double coeff_norm() const;
};

// The map families under study.  RealQuadratic is q_tau(x) = tau - 1 - tau x^2
// on I = [-1,1]; ComplexQuadratic is p_c(z) = z^2 + c; Perturbed is
// q_tau((id + lambda w)(x)) with w(-1) = w(1) = 0.
struct RealQuadratic {
    double tau;
};
struct ComplexQuadratic {
    Complex c;
};
struct Perturbed {
    double tau;
    Polynomial w;
    double lambda;
};

class MapFamily {
  public:
    using Kind = std::variant<RealQuadratic, ComplexQuadratic, Perturbed>;

    static MapFamily quadratic(double tau);
    static MapFamily complex_quadratic(Complex c);
    // Checks w(+-1)=0 and certifies unimodality of the composition.
    static MapFamily perturbed(double tau, Polynomial w, double lambda);
    // Range-validated construction path used by PerturbedFamily::at.
    static MapFamily perturbed_unchecked(double tau, Polynomial w, double lambda);

    const Kind& kind() const { return kind_; }
    bool is_real() const { return !std::holds_alternative<ComplexQuadratic>(kind_); }
    // True when f(x) = f(-x) holds identically (quadratic, or odd w).
    bool is_even() const;
    double tau() const; // real kinds only

    std::string describe() const;

  private:
    explicit MapFamily(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

// Pointwise calculus.  Real overloads raise DomainError outside [-1,1]
// unless `extend` is set.
double eval_map(const MapFamily& f, double x, bool extend = false);
Complex eval_map(const MapFamily& f, Complex z);
double deriv_map(const MapFamily& f, double x, int order = 1, bool extend = false);
Complex deriv_map(const MapFamily& f, Complex z, int order = 1);

// D^3f/Df - (3/2)(D^2f/Df)^2.  Raises SingularAtCritical when |Df| < 1e-12.
double schwarzian(const MapFamily& f, double x);

// Parameter translation between the two normalizations: q_tau is affinely
// conjugate (h(x) = -tau x) to z^2 + c with c = tau - tau^2, i.e. z^2 - a
// with a = tau^2 - tau.
double conjugacy_a(double tau);
Complex conjugacy_c(double tau);

// Special bump field
//   vtilde_n(z) = (1-z^2)(1-e^{-2n}) + (2/n)(e^{-n(1+z)} + e^{-n(1-z)} - e^{-2n} - 1)
// which vanishes with its first derivative at z = +-1.
double special_bump_field(int n, double z);
double special_bump_field_deriv(int n, double z);

// A bump localized in a target interval A1 = [a_lo, a_hi], obtained from
// vtilde_n by the affine rescale Q : A1 -> [-1,1] and an amplitude knob.
struct BumpFieldSpec {
    int n = 1;
    double a_lo = 0.3;
    double a_hi = 0.6;
    double amplitude = 0.05;
};

double bump_field_value(const BumpFieldSpec& s, double x); // 0 outside A1
double bump_field_deriv(const BumpFieldSpec& s, double x);

// Least-squares polynomial realization of the rescaled bump on I, vanishing
// at +-1.  With odd_projection the odd part is fitted (basis x^{2k+1}(1-x^2)),
// keeping perturbed families inside the even map class used by the nest.
Polynomial bump_polynomial(const BumpFieldSpec& s, int degree = 17, bool odd_projection = true);

struct ValidationOptions {
    int grid = 4096; // sample points for the monotonicity scan
};

struct UnimodalReport {
    bool valid = false;
    double critical_point = 0.0;     // single critical point when valid
    double first_bad_lambda = 0.0;   // offending lambda when a range scan fails
    bool has_bad_lambda = false;
    std::string detail;
};

// Certifies that a real family has exactly one critical point in int I,
// via a grid scan of D(id + lambda w) * Dq plus a derivative Lipschitz bound.
UnimodalReport validate_unimodal(const MapFamily& f, const ValidationOptions& opts = {});

// A perturbation family f_lambda = q_tau o (id + lambda w), validated on a
// lambda interval.
struct PerturbedFamily {
    double tau = 0;
    Polynomial w;
    double lambda_lo = 0, lambda_hi = 0;

    MapFamily at(double lambda) const; // OutOfRange outside the validated range
};

struct MakeFamilyResult {
    std::optional<PerturbedFamily> family; // engaged iff report.valid
    UnimodalReport report;
};

MakeFamilyResult make_perturbed_family(double tau, Polynomial w, double lambda_lo,
                                       double lambda_hi, const ValidationOptions& opts = {});

// Scalar-generic evaluation core used by the nest/params engines.  Parameters
// are carried at precision R so that deep parameter bisections can pass
// BigFloat lambdas exactly.
template <class R> struct RealMap {
    R tau{};
    bool has_w = false;
    Polynomial w;
    R lambda{};

    R operator()(R x) const {
        if (!has_w) return tau - R(1) - tau * x * x;
        R g = x + lambda * w.value(x);
        return tau - R(1) - tau * g * g;
    }
    R deriv(R x) const {
        if (!has_w) return R(-2) * tau * x;
        R g = x + lambda * w.value(x);
        R gp = R(1) + lambda * w.deriv(x);
        return R(-2) * tau * g * gp;
    }
};

// Real even kinds only (the nest engine's domain); NotSymmetric otherwise.
template <class R> RealMap<R> real_map(const MapFamily& f);

extern template RealMap<double> real_map<double>(const MapFamily&);
extern template RealMap<BigFloat> real_map<BigFloat>(const MapFamily&);

} // namespace nestlab
