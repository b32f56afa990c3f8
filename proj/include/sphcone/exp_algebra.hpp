#pragma once

// Laurent polynomials in z and w = z^alpha, and their quotients.
//
// The term (a, b) -> c stands for c z^a w^b = c z^(a + b alpha).  Values are
// taken on the log-cover: w = exp(alpha * log z) for the log carried by a
// CoverPoint, so branch n means log z = Log z + 2 pi i n.

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sphcone/types.hpp"

namespace sphcone {

struct Exponent {
    int a = 0;
    int b = 0;
    friend auto operator<=>(const Exponent&, const Exponent&) = default;
};

class ExpPoly {
public:
    using TermMap = std::map<Exponent, cplx>;

    explicit ExpPoly(double alpha = 1.0) : alpha_(alpha) {}
    ExpPoly(double alpha, TermMap terms);

    static ExpPoly constant(double alpha, cplx c);
    static ExpPoly monomial(double alpha, Exponent e, cplx c = 1.0);
    // ascending coefficients c_0 + c_1 z + ...
    static ExpPoly from_polynomial(double alpha, std::span<const cplx> ascending);

    double alpha() const noexcept { return alpha_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }
    cplx coefficient(Exponent e) const;
    double exponent_value(Exponent e) const { return e.a + e.b * alpha_; }

    ExpPoly derivative() const;
    ExpPoly times_monomial(Exponent e, cplx c = 1.0) const;
    // drop coefficients below rel_tol * max |coefficient|
    ExpPoly pruned(double rel_tol) const;
    // w -> exp(2 pi i alpha turns) w, i.e. the germ after `turns` turns about 0
    ExpPoly monodromy_shifted(int turns) const;
    // p(lambda z) with lambda^alpha taken from the principal log of lambda
    ExpPoly rescaled_argument(cplx lambda) const;

    cplx operator()(const CoverPoint& p) const;
    // sum of |c z^a w^b|, the natural rounding scale of the value at p
    double magnitude_at(const CoverPoint& p) const;
    double max_abs_coefficient() const;

    bool is_polynomial() const;  // only b = 0 and a >= 0
    std::vector<cplx> polynomial_coefficients() const;

    ExpPoly& operator+=(const ExpPoly& o);
    ExpPoly& operator-=(const ExpPoly& o);
    ExpPoly& operator*=(const ExpPoly& o);
    ExpPoly& operator*=(cplx c);

    friend ExpPoly operator+(ExpPoly l, const ExpPoly& r) { return l += r; }
    friend ExpPoly operator-(ExpPoly l, const ExpPoly& r) { return l -= r; }
    friend ExpPoly operator*(ExpPoly l, const ExpPoly& r) { return l *= r; }
    friend ExpPoly operator*(ExpPoly l, cplx c) { return l *= c; }
    friend ExpPoly operator*(cplx c, ExpPoly r) { return r *= c; }
    friend ExpPoly operator-(ExpPoly p) { return p *= -1.0; }
    friend bool operator==(const ExpPoly& l, const ExpPoly& r) {
        return l.alpha_ == r.alpha_ && l.terms_ == r.terms_;
    }

private:
    void check_alpha(const ExpPoly& o) const;
    void drop_zeros();

    double alpha_;
    TermMap terms_;
};

// z^shift * poly(z), poly with nonzero constant term
struct MonomialTimesPoly {
    Exponent shift;
    std::vector<cplx> poly;  // ascending
};

// Succeeds when every term carries the same power of w.
std::optional<MonomialTimesPoly> split_monomial(const ExpPoly& p);

class TwistedRational {
public:
    explicit TwistedRational(ExpPoly num);
    TwistedRational(ExpPoly num, ExpPoly den);

    static TwistedRational constant(double alpha, cplx c);

    const ExpPoly& num() const noexcept { return num_; }
    const ExpPoly& den() const noexcept { return den_; }
    double alpha() const noexcept { return num_.alpha(); }
    bool is_zero() const noexcept { return num_.is_zero(); }

    TwistedRational derivative() const;
    TwistedRational reciprocal() const;
    TwistedRational pruned(double rel_tol) const;
    TwistedRational monodromy_shifted(int turns) const;
    TwistedRational rescaled_argument(cplx lambda) const;

    cplx operator()(const CoverPoint& p) const;  // throws pole

    TwistedRational& operator+=(const TwistedRational& o);
    TwistedRational& operator-=(const TwistedRational& o);
    TwistedRational& operator*=(const TwistedRational& o);
    TwistedRational& operator/=(const TwistedRational& o);
    TwistedRational& operator*=(cplx c);

    friend TwistedRational operator+(TwistedRational l, const TwistedRational& r) { return l += r; }
    friend TwistedRational operator-(TwistedRational l, const TwistedRational& r) { return l -= r; }
    friend TwistedRational operator*(TwistedRational l, const TwistedRational& r) { return l *= r; }
    friend TwistedRational operator/(TwistedRational l, const TwistedRational& r) { return l /= r; }
    friend TwistedRational operator*(TwistedRational l, cplx c) { return l *= c; }
    friend TwistedRational operator*(cplx c, TwistedRational r) { return r *= c; }

private:
    void normalize();

    ExpPoly num_;
    ExpPoly den_;
};

cplx evaluate(const TwistedRational& r, cplx z, int branch);
cplx evaluate_lifted(const TwistedRational& r, const CoverPoint& p);

struct PolyRoot {
    cplx value;
    int multiplicity = 1;
};

// Roots of a genuine polynomial (b = 0, a >= 0 terms only), clustered into
// multiplicities.  Zero roots are stripped exactly before the eigenvalue step.
std::vector<PolyRoot> poly_roots(const ExpPoly& p);
std::vector<PolyRoot> poly_roots(std::span<const cplx> ascending);

// ascending-coefficient helpers
cplx poly_eval(std::span<const cplx> ascending, cplx z);
std::vector<cplx> poly_from_roots(std::span<const cplx> roots);
std::vector<cplx> poly_deflate(std::span<const cplx> ascending, cplx root);

// Cancel common roots of numerator and denominator when both are a monomial
// times a polynomial.  The result is checked against the input at five
// points; nullopt when the structure is missing or the check fails.
std::optional<TwistedRational> cancel_common_roots(const TwistedRational& r, double match_tol = 1e-6);

}  // namespace sphcone
