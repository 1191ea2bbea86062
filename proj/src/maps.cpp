#include "nestlab/maps.hpp"

#include <algorithm>
#include <sstream>

namespace nestlab {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::DomainError: return "DomainError";
        case Errc::SingularAtCritical: return "SingularAtCritical";
        case Errc::NotUnimodal: return "NotUnimodal";
        case Errc::NotSymmetric: return "NotSymmetric";
        case Errc::NoReversingFixedPoint: return "NoReversingFixedPoint";
        case Errc::PeriodicCritical: return "PeriodicCritical";
        case Errc::EscapedNest: return "EscapedNest";
        case Errc::PrecisionExhausted: return "PrecisionExhausted";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::InsufficientLevels: return "InsufficientLevels";
        case Errc::CriticalHit: return "CriticalHit";
        case Errc::NotInF: return "NotInF";
        case Errc::AddressUnresolvable: return "AddressUnresolvable";
        case Errc::MonotonicityViolation: return "MonotonicityViolation";
        case Errc::InsufficientRows: return "InsufficientRows";
        case Errc::EmptyInterval: return "EmptyInterval";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::DegenerateInterval: return "DegenerateInterval";
        case Errc::NotNested: return "NotNested";
        case Errc::GridTooCoarse: return "GridTooCoarse";
    }
    return "Error";
}

Polynomial Polynomial::derivative() const {
    Polynomial d;
    if (c.size() <= 1) return d;
    d.c.resize(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d.c[k - 1] = double(k) * c[k];
    return d;
}

bool Polynomial::is_zero(double tol) const {
    for (double v : c)
        if (std::abs(v) > tol) return false;
    return true;
}

bool Polynomial::is_odd(double tol) const {
    for (std::size_t k = 0; k < c.size(); k += 2)
        if (std::abs(c[k]) > tol) return false;
    return true;
}

double Polynomial::coeff_norm() const {
    double s = 0;
    for (double v : c) s += std::abs(v);
    return s;
}

namespace {

constexpr double kBoundarySlack = 4e-15;

void check_real_domain(double x, bool extend) {
    if (!extend && std::abs(x) > 1.0 + kBoundarySlack)
        raise(Errc::DomainError, "real map evaluated outside [-1,1] at x=" + std::to_string(x));
}

const Perturbed* as_perturbed(const MapFamily& f) { return std::get_if<Perturbed>(&f.kind()); }

// g_lambda = id + lambda w on [-1,1]; monotone increasing iff 1 + lambda w' > 0.
// Grid minimum plus a Lipschitz bound on w' certifies positivity between nodes.
bool certify_monotone(const Polynomial& w, double lambda, int grid, double* min_seen) {
    Polynomial wp = w.derivative();
    double lip = wp.derivative().coeff_norm(); // sup |w''| on [-1,1] bound
    double h = 2.0 / grid;
    double slack = std::abs(lambda) * lip * h / 2;
    double lo = 1e300;
    for (int i = 0; i <= grid; ++i) {
        double x = -1.0 + h * i;
        lo = std::min(lo, 1.0 + lambda * wp.value(x));
    }
    if (min_seen) *min_seen = lo;
    return lo - slack > 0;
}

} // namespace

MapFamily MapFamily::quadratic(double tau) {
    if (!(tau >= 0.5 && tau <= 2.0))
        raise(Errc::DomainError, "RealQuadratic requires tau in [1/2,2], got " + std::to_string(tau));
    return MapFamily(Kind{RealQuadratic{tau}});
}

MapFamily MapFamily::complex_quadratic(Complex c) { return MapFamily(Kind{ComplexQuadratic{c}}); }

MapFamily MapFamily::perturbed(double tau, Polynomial w, double lambda) {
    if (!(tau >= 0.5 && tau <= 2.0))
        raise(Errc::DomainError, "Perturbed requires tau in [1/2,2]");
    if (std::abs(w.value(1.0)) > 1e-12 || std::abs(w.value(-1.0)) > 1e-12)
        raise(Errc::NotUnimodal, "perturbation field must vanish at +-1");
    MapFamily f(Kind{Perturbed{tau, std::move(w), lambda}});
    UnimodalReport rep = validate_unimodal(f);
    if (!rep.valid) raise(Errc::NotUnimodal, rep.detail);
    return f;
}

MapFamily MapFamily::perturbed_unchecked(double tau, Polynomial w, double lambda) {
    return MapFamily(Kind{Perturbed{tau, std::move(w), lambda}});
}

bool MapFamily::is_even() const {
    if (std::holds_alternative<RealQuadratic>(kind_)) return true;
    if (const Perturbed* p = as_perturbed(*this))
        return p->w.is_zero(1e-300) || std::abs(p->lambda) == 0.0 || p->w.is_odd();
    return false;
}

double MapFamily::tau() const {
    if (const RealQuadratic* q = std::get_if<RealQuadratic>(&kind_)) return q->tau;
    if (const Perturbed* p = std::get_if<Perturbed>(&kind_)) return p->tau;
    raise(Errc::DomainError, "tau() on complex family");
}

std::string MapFamily::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (const RealQuadratic* q = std::get_if<RealQuadratic>(&kind_))
        os << "quadratic tau=" << q->tau;
    else if (const ComplexQuadratic* z = std::get_if<ComplexQuadratic>(&kind_))
        os << "complex c=" << z->c.real() << "+" << z->c.imag() << "i";
    else if (const Perturbed* p = std::get_if<Perturbed>(&kind_))
        os << "perturbed tau=" << p->tau << " lambda=" << p->lambda << " deg(w)=" << p->w.degree();
    return os.str();
}

double eval_map(const MapFamily& f, double x, bool extend) {
    check_real_domain(x, extend);
    if (const RealQuadratic* q = std::get_if<RealQuadratic>(&f.kind()))
        return q->tau - 1.0 - q->tau * x * x;
    if (const Perturbed* p = as_perturbed(f)) {
        double g = x + p->lambda * p->w.value(x);
        return p->tau - 1.0 - p->tau * g * g;
    }
    raise(Errc::DomainError, "real evaluation of a complex family");
}

Complex eval_map(const MapFamily& f, Complex z) {
    if (const ComplexQuadratic* q = std::get_if<ComplexQuadratic>(&f.kind())) return z * z + q->c;
    if (const RealQuadratic* q = std::get_if<RealQuadratic>(&f.kind()))
        return q->tau - 1.0 - q->tau * z * z;
    const Perturbed* p = as_perturbed(f);
    Complex g = z + p->lambda * p->w.value(z);
    return p->tau - 1.0 - p->tau * g * g;
}

double deriv_map(const MapFamily& f, double x, int order, bool extend) {
    check_real_domain(x, extend);
    if (order != 1 && order != 2) raise(Errc::DomainError, "derivative order must be 1 or 2");
    if (const RealQuadratic* q = std::get_if<RealQuadratic>(&f.kind()))
        return order == 1 ? -2.0 * q->tau * x : -2.0 * q->tau;
    if (const Perturbed* p = as_perturbed(f)) {
        double g = x + p->lambda * p->w.value(x);
        double gp = 1.0 + p->lambda * p->w.deriv(x);
        if (order == 1) return -2.0 * p->tau * g * gp;
        double gpp = p->lambda * p->w.derivative().deriv(x);
        return -2.0 * p->tau * (gp * gp + g * gpp);
    }
    raise(Errc::DomainError, "real derivative of a complex family");
}

Complex deriv_map(const MapFamily& f, Complex z, int order) {
    if (order != 1 && order != 2) raise(Errc::DomainError, "derivative order must be 1 or 2");
    if (const ComplexQuadratic* q = std::get_if<ComplexQuadratic>(&f.kind())) {
        (void)q;
        return order == 1 ? 2.0 * z : Complex(2.0, 0.0);
    }
    if (const RealQuadratic* q = std::get_if<RealQuadratic>(&f.kind()))
        return order == 1 ? Complex(-2.0 * q->tau) * z : Complex(-2.0 * q->tau);
    const Perturbed* p = as_perturbed(f);
    Complex g = z + p->lambda * p->w.value(z);
    Complex gp = 1.0 + p->lambda * p->w.deriv(z);
    if (order == 1) return -2.0 * p->tau * g * gp;
    Complex gpp = p->lambda * p->w.derivative().deriv(z);
    return -2.0 * p->tau * (gp * gp + g * gpp);
}

double schwarzian(const MapFamily& f, double x) {
    check_real_domain(x, false);
    double df = deriv_map(f, x, 1);
    if (std::abs(df) < 1e-12)
        raise(Errc::SingularAtCritical, "Schwarzian undefined where Df vanishes");
    if (!as_perturbed(f)) {
        // quadratic kinds: D^3 f = 0, so S = -(3/2) (D^2 f / Df)^2 = -3/(2 x^2)
        return -1.5 / (x * x);
    }
    // S(q o g) = (Sq o g) (g')^2 + Sg
    const Perturbed* p = as_perturbed(f);
    double g = x + p->lambda * p->w.value(x);
    Polynomial wp = p->w.derivative();
    Polynomial wpp = wp.derivative();
    double gp = 1.0 + p->lambda * wp.value(x);
    double gpp = p->lambda * wpp.value(x);
    double gppp = p->lambda * wpp.derivative().value(x);
    if (std::abs(g) < 1e-150 || std::abs(gp) < 1e-12)
        raise(Errc::SingularAtCritical, "Schwarzian singular at perturbed critical point");
    double sq = -1.5 / (g * g);
    double r = gpp / gp;
    double sg = gppp / gp - 1.5 * r * r;
    return sq * gp * gp + sg;
}

double conjugacy_a(double tau) { return tau * tau - tau; }
Complex conjugacy_c(double tau) { return Complex(tau - tau * tau, 0.0); }

double special_bump_field(int n, double z) {
    double e2n = std::exp(-2.0 * n);
    return (1.0 - z * z) * (1.0 - e2n) +
           (2.0 / n) * (std::exp(-n * (1.0 + z)) + std::exp(-n * (1.0 - z)) - e2n - 1.0);
}

double special_bump_field_deriv(int n, double z) {
    double e2n = std::exp(-2.0 * n);
    return -2.0 * z * (1.0 - e2n) + 2.0 * (std::exp(-n * (1.0 - z)) - std::exp(-n * (1.0 + z)));
}

double bump_field_value(const BumpFieldSpec& s, double x) {
    if (x < s.a_lo || x > s.a_hi) return 0.0;
    double z = (2.0 * x - (s.a_lo + s.a_hi)) / (s.a_hi - s.a_lo);
    return s.amplitude * special_bump_field(s.n, z);
}

double bump_field_deriv(const BumpFieldSpec& s, double x) {
    if (x < s.a_lo || x > s.a_hi) return 0.0;
    double len = s.a_hi - s.a_lo;
    double z = (2.0 * x - (s.a_lo + s.a_hi)) / len;
    return s.amplitude * special_bump_field_deriv(s.n, z) * (2.0 / len);
}

namespace {

// Solve the small SPD system G a = b in place (Cholesky); returns false if G
// is numerically singular.
bool cholesky_solve(std::vector<double>& G, std::vector<double>& b, int m) {
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = G[i * m + j];
            for (int k = 0; k < j; ++k) s -= G[i * m + k] * G[j * m + k];
            if (i == j) {
                if (s <= 0) return false;
                G[i * m + i] = std::sqrt(s);
            } else {
                G[i * m + j] = s / G[j * m + j];
            }
        }
    }
    for (int i = 0; i < m; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= G[i * m + k] * b[k];
        b[i] = s / G[i * m + i];
    }
    for (int i = m - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < m; ++k) s -= G[k * m + i] * b[k];
        b[i] = s / G[i * m + i];
    }
    return true;
}

} // namespace

Polynomial bump_polynomial(const BumpFieldSpec& s, int degree, bool odd_projection) {
    if (degree < 3) raise(Errc::DomainError, "bump_polynomial needs degree >= 3");
    // basis phi_k = x^{e_k} (1 - x^2), e_k = 2k+1 (odd) or k (general)
    std::vector<int> expo;
    if (odd_projection) {
        for (int e = 1; e + 2 <= degree; e += 2) expo.push_back(e);
    } else {
        for (int e = 0; e + 2 <= degree; ++e) expo.push_back(e);
    }
    int m = int(expo.size());
    const int npts = 2048;
    std::vector<double> G(m * m, 0.0), b(m, 0.0);
    for (int i = 0; i < npts; ++i) {
        double x = -1.0 + 2.0 * (i + 0.5) / npts;
        double target = bump_field_value(s, x);
        if (odd_projection) target = 0.5 * (target - bump_field_value(s, -x));
        std::vector<double> phi(m);
        for (int k = 0; k < m; ++k) phi[k] = std::pow(x, expo[k]) * (1.0 - x * x);
        for (int r = 0; r < m; ++r) {
            b[r] += phi[r] * target;
            for (int cidx = 0; cidx <= r; ++cidx) G[r * m + cidx] += phi[r] * phi[cidx];
        }
    }
    for (int r = 0; r < m; ++r)
        for (int cidx = r + 1; cidx < m; ++cidx) G[r * m + cidx] = G[cidx * m + r];
    for (int r = 0; r < m; ++r) G[r * m + r] += 1e-12 * (G[r * m + r] + 1.0);
    if (!cholesky_solve(G, b, m)) raise(Errc::PrecisionExhausted, "bump fit normal equations singular");
    Polynomial out;
    out.c.assign(degree + 1, 0.0);
    for (int k = 0; k < m; ++k) {
        out.c[expo[k]] += b[k];
        out.c[expo[k] + 2] -= b[k];
    }
    return out;
}

UnimodalReport validate_unimodal(const MapFamily& f, const ValidationOptions& opts) {
    UnimodalReport rep;
    if (!f.is_real()) raise(Errc::DomainError, "validate_unimodal is a real-family operation");
    if (std::holds_alternative<RealQuadratic>(f.kind())) {
        rep.valid = true;
        rep.critical_point = 0.0;
        return rep;
    }
    const Perturbed* p = as_perturbed(f);
    double min_seen = 0;
    if (!certify_monotone(p->w, p->lambda, opts.grid, &min_seen)) {
        rep.valid = false;
        rep.detail = "id + lambda w not certified monotone (min 1+lambda w' = " +
                     std::to_string(min_seen) + ")";
        return rep;
    }
    // g monotone increasing with g(-1) = -1, g(1) = 1: the single critical
    // point of q o g is g^{-1}(0).
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = mid + p->lambda * p->w.value(mid);
        (gm < 0 ? lo : hi) = mid;
    }
    rep.valid = true;
    rep.critical_point = 0.5 * (lo + hi);
    return rep;
}

MakeFamilyResult make_perturbed_family(double tau, Polynomial w, double lambda_lo,
                                       double lambda_hi, const ValidationOptions& opts) {
    if (!(lambda_lo <= 0.0 && 0.0 <= lambda_hi))
        raise(Errc::DomainError, "lambda range must contain 0");
    if (std::abs(w.value(1.0)) > 1e-12 || std::abs(w.value(-1.0)) > 1e-12)
        raise(Errc::NotUnimodal, "perturbation field must vanish at +-1");

    MakeFamilyResult res;
    // 1 + lambda w'(x) is linear in lambda, so the range endpoints decide.
    bool lo_ok = certify_monotone(w, lambda_lo, opts.grid, nullptr);
    bool hi_ok = certify_monotone(w, lambda_hi, opts.grid, nullptr);
    if (lo_ok && hi_ok) {
        res.report.valid = true;
        res.family = PerturbedFamily{tau, std::move(w), lambda_lo, lambda_hi};
        return res;
    }
    // scan outward from 0 for the first offending lambda
    double bad_side = hi_ok ? lambda_lo : lambda_hi;
    double good = 0.0, bad = bad_side;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (good + bad);
        (certify_monotone(w, mid, opts.grid, nullptr) ? good : bad) = mid;
    }
    res.report.valid = false;
    res.report.has_bad_lambda = true;
    res.report.first_bad_lambda = bad;
    res.report.detail = "unimodality fails at lambda=" + std::to_string(bad);
    return res;
}

MapFamily PerturbedFamily::at(double lambda) const {
    if (lambda < lambda_lo || lambda > lambda_hi)
        raise(Errc::OutOfRange, "lambda outside validated range");
    return MapFamily::perturbed_unchecked(tau, w, lambda);
}

template <class R> RealMap<R> real_map(const MapFamily& f) {
    if (!f.is_real()) raise(Errc::DomainError, "real_map of a complex family");
    if (!f.is_even())
        raise(Errc::NotSymmetric, "nest engine requires an even map (odd perturbation field)");
    RealMap<R> m;
    if (const RealQuadratic* q = std::get_if<RealQuadratic>(&f.kind())) {
        m.tau = real_traits<R>::from(q->tau);
        return m;
    }
    const Perturbed* p = as_perturbed(f);
    m.tau = real_traits<R>::from(p->tau);
    if (!p->w.is_zero(1e-300) && p->lambda != 0.0) {
        m.has_w = true;
        m.w = p->w;
        m.lambda = real_traits<R>::from(p->lambda);
    }
    return m;
}

template RealMap<double> real_map<double>(const MapFamily&);
template RealMap<BigFloat> real_map<BigFloat>(const MapFamily&);

} // namespace nestlab
