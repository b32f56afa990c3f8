#include "sphcone/exp_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace sphcone {

namespace {

cplx ipow(cplx x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    cplx r = 1.0;
    while (n) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

constexpr double eps = std::numeric_limits<double>::epsilon();

}  // namespace

// ---------------------------------------------------------------- ExpPoly

ExpPoly::ExpPoly(double alpha, TermMap terms) : alpha_(alpha), terms_(std::move(terms)) { drop_zeros(); }

ExpPoly ExpPoly::constant(double alpha, cplx c) { return monomial(alpha, {0, 0}, c); }

ExpPoly ExpPoly::monomial(double alpha, Exponent e, cplx c) {
    ExpPoly p(alpha);
    if (c != 0.0) p.terms_[e] = c;
    return p;
}

ExpPoly ExpPoly::from_polynomial(double alpha, std::span<const cplx> asc) {
    ExpPoly p(alpha);
    for (std::size_t i = 0; i < asc.size(); ++i)
        if (asc[i] != 0.0) p.terms_[{static_cast<int>(i), 0}] = asc[i];
    return p;
}

void ExpPoly::check_alpha(const ExpPoly& o) const {
    if (o.alpha_ != alpha_)
        throw Error(Errc::alpha_mismatch,
                    "alpha " + std::to_string(alpha_) + " vs " + std::to_string(o.alpha_));
}

void ExpPoly::drop_zeros() { std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; }); }

cplx ExpPoly::coefficient(Exponent e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? cplx(0.0) : it->second;
}

ExpPoly ExpPoly::derivative() const {
    ExpPoly d(alpha_);
    for (const auto& [e, c] : terms_) {
        cplx v = c * exponent_value(e);
        if (v != 0.0) d.terms_[{e.a - 1, e.b}] = v;
    }
    return d;
}

ExpPoly ExpPoly::times_monomial(Exponent s, cplx c) const {
    ExpPoly r(alpha_);
    if (c == 0.0) return r;
    for (const auto& [e, v] : terms_) r.terms_[{e.a + s.a, e.b + s.b}] = v * c;
    return r;
}

ExpPoly ExpPoly::pruned(double rel_tol) const {
    ExpPoly r = *this;
    const double cut = rel_tol * max_abs_coefficient();
    std::erase_if(r.terms_, [cut](const auto& kv) { return std::abs(kv.second) <= cut; });
    return r;
}

ExpPoly ExpPoly::monodromy_shifted(int turns) const {
    ExpPoly r = *this;
    for (auto& [e, c] : r.terms_) c *= std::exp(cplx(0.0, two_pi * alpha_ * e.b * turns));
    return r;
}

ExpPoly ExpPoly::rescaled_argument(cplx lambda) const {
    if (lambda == 0.0) throw Error(Errc::branch_point, "rescaling by zero");
    const cplx L = std::log(lambda);
    ExpPoly r = *this;
    for (auto& [e, c] : r.terms_) c *= std::exp(exponent_value(e) * L);
    return r;
}

cplx ExpPoly::operator()(const CoverPoint& p) const {
    const cplx w = std::exp(alpha_ * p.log);
    cplx s = 0.0;
    for (const auto& [e, c] : terms_) s += c * ipow(p.z, e.a) * ipow(w, e.b);
    return s;
}

double ExpPoly::magnitude_at(const CoverPoint& p) const {
    const double lz = std::log(std::abs(p.z));
    double s = 0.0;
    // |z^a w^b| = exp((a + b alpha) ln|z| - b alpha * (branch angle part))
    for (const auto& [e, c] : terms_)
        s += std::abs(c) * std::exp(e.a * lz + e.b * (alpha_ * p.log).real());
    return s;
}

double ExpPoly::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& kv : terms_) m = std::max(m, std::abs(kv.second));
    return m;
}

bool ExpPoly::is_polynomial() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& kv) { return kv.first.b == 0 && kv.first.a >= 0; });
}

std::vector<cplx> ExpPoly::polynomial_coefficients() const {
    if (!is_polynomial()) throw Error(Errc::not_polynomial, "terms with w or negative powers present");
    int deg = 0;
    for (const auto& kv : terms_) deg = std::max(deg, kv.first.a);
    std::vector<cplx> c(deg + 1, 0.0);
    for (const auto& [e, v] : terms_) c[e.a] = v;
    return c;
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& o) {
    check_alpha(o);
    for (const auto& [e, c] : o.terms_) terms_[e] += c;
    drop_zeros();
    return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& o) {
    check_alpha(o);
    for (const auto& [e, c] : o.terms_) terms_[e] -= c;
    drop_zeros();
    return *this;
}

ExpPoly& ExpPoly::operator*=(const ExpPoly& o) {
    check_alpha(o);
    TermMap out;
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) out[{e1.a + e2.a, e1.b + e2.b}] += c1 * c2;
    terms_ = std::move(out);
    drop_zeros();
    return *this;
}

ExpPoly& ExpPoly::operator*=(cplx c) {
    if (c == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& kv : terms_) kv.second *= c;
    return *this;
}

std::optional<MonomialTimesPoly> split_monomial(const ExpPoly& p) {
    if (p.is_zero()) return std::nullopt;
    const int b = p.terms().begin()->first.b;
    int amin = std::numeric_limits<int>::max(), amax = std::numeric_limits<int>::min();
    for (const auto& kv : p.terms()) {
        if (kv.first.b != b) return std::nullopt;
        amin = std::min(amin, kv.first.a);
        amax = std::max(amax, kv.first.a);
    }
    MonomialTimesPoly m{{amin, b}, std::vector<cplx>(amax - amin + 1, 0.0)};
    for (const auto& [e, c] : p.terms()) m.poly[e.a - amin] = c;
    return m;
}

// ---------------------------------------------------------- TwistedRational

TwistedRational::TwistedRational(ExpPoly num) : TwistedRational(num, ExpPoly::constant(num.alpha(), 1.0)) {}

TwistedRational::TwistedRational(ExpPoly num, ExpPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (num_.alpha() != den_.alpha())
        throw Error(Errc::alpha_mismatch, "numerator and denominator use different alpha");
    if (den_.is_zero()) throw Error(Errc::division_by_zero, "zero denominator");
    normalize();
}

TwistedRational TwistedRational::constant(double alpha, cplx c) {
    return TwistedRational(ExpPoly::constant(alpha, c));
}

void TwistedRational::normalize() {
    int amin = std::numeric_limits<int>::max(), bmin = std::numeric_limits<int>::max();
    for (const auto* p : {&num_, &den_})
        for (const auto& kv : p->terms()) {
            amin = std::min(amin, kv.first.a);
            bmin = std::min(bmin, kv.first.b);
        }
    if (num_.is_zero()) {
        // 0 / d == 0 / 1
        den_ = ExpPoly::constant(den_.alpha(), 1.0);
        return;
    }
    if (amin != 0 || bmin != 0) {
        num_ = num_.times_monomial({-amin, -bmin});
        den_ = den_.times_monomial({-amin, -bmin});
    }
}

TwistedRational TwistedRational::derivative() const {
    return TwistedRational(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

TwistedRational TwistedRational::reciprocal() const {
    if (num_.is_zero()) throw Error(Errc::division_by_zero, "reciprocal of zero");
    return TwistedRational(den_, num_);
}

TwistedRational TwistedRational::pruned(double rel_tol) const {
    return TwistedRational(num_.pruned(rel_tol), den_.pruned(rel_tol));
}

TwistedRational TwistedRational::monodromy_shifted(int turns) const {
    return TwistedRational(num_.monodromy_shifted(turns), den_.monodromy_shifted(turns));
}

TwistedRational TwistedRational::rescaled_argument(cplx lambda) const {
    return TwistedRational(num_.rescaled_argument(lambda), den_.rescaled_argument(lambda));
}

cplx TwistedRational::operator()(const CoverPoint& p) const {
    const cplx d = den_(p);
    if (std::abs(d) <= 4 * eps * den_.magnitude_at(p))
        throw Error(Errc::pole, "denominator vanishes at z = (" + std::to_string(p.z.real()) + ", " +
                                    std::to_string(p.z.imag()) + ")");
    return num_(p) / d;
}

namespace {

// c with b == c * a when the denominators are proportional term by term
std::optional<cplx> proportional(const ExpPoly& a, const ExpPoly& b) {
    if (a.terms().size() != b.terms().size()) return std::nullopt;
    std::optional<cplx> ratio;
    double big = 0;
    for (const auto& [e, c] : a.terms()) big = std::max(big, std::abs(c));
    for (const auto& [e, c] : a.terms()) {
        const cplx d = b.coefficient(e);
        if (d == 0.0) return std::nullopt;
        if (std::abs(c) < 1e-3 * big) continue;
        if (!ratio) ratio = d / c;
    }
    for (const auto& [e, c] : a.terms())
        if (std::abs(b.coefficient(e) - *ratio * c) > 1e-12 * std::abs(*ratio) * big) return std::nullopt;
    return ratio;
}

}  // namespace

// equal denominators (up to a constant) are kept, not multiplied: sums of
// many terms over one denominator would otherwise raise it to a power
TwistedRational& TwistedRational::operator+=(const TwistedRational& o) {
    if (auto r = proportional(den_, o.den_)) {
        *this = TwistedRational(num_ * ExpPoly::constant(alpha(), *r) + o.num_, o.den_);
        return *this;
    }
    *this = TwistedRational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    return *this;
}

TwistedRational& TwistedRational::operator-=(const TwistedRational& o) {
    if (auto r = proportional(den_, o.den_)) {
        *this = TwistedRational(num_ * ExpPoly::constant(alpha(), *r) - o.num_, o.den_);
        return *this;
    }
    *this = TwistedRational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    return *this;
}

TwistedRational& TwistedRational::operator*=(const TwistedRational& o) {
    *this = TwistedRational(num_ * o.num_, den_ * o.den_);
    return *this;
}

TwistedRational& TwistedRational::operator/=(const TwistedRational& o) {
    if (o.num_.is_zero()) throw Error(Errc::division_by_zero, "division by the zero function");
    *this = TwistedRational(num_ * o.den_, den_ * o.num_);
    return *this;
}

TwistedRational& TwistedRational::operator*=(cplx c) {
    num_ *= c;
    normalize();
    return *this;
}

cplx evaluate(const TwistedRational& r, cplx z, int branch) { return r(CoverPoint::on_branch(z, branch)); }

cplx evaluate_lifted(const TwistedRational& r, const CoverPoint& p) { return r(p); }

// ------------------------------------------------------------------ roots

cplx poly_eval(std::span<const cplx> c, cplx z) {
    cplx s = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * z + c[i];
    return s;
}

std::vector<cplx> poly_from_roots(std::span<const cplx> roots) {
    std::vector<cplx> c{1.0};
    for (cplx r : roots) {
        std::vector<cplx> n(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            n[i + 1] += c[i];
            n[i] -= r * c[i];
        }
        c = std::move(n);
    }
    return c;
}

std::vector<cplx> poly_deflate(std::span<const cplx> a, cplx r) {
    const std::size_t n = a.size() - 1;
    std::vector<cplx> q(n, 0.0);
    if (n == 0) return q;
    if (std::abs(r) <= 1.0) {
        q[n - 1] = a[n];
        for (std::size_t i = n - 1; i-- > 0;) q[i] = a[i + 1] + r * q[i + 1];
    } else {
        // backward division is the stable direction for large roots
        q[0] = -a[0] / r;
        for (std::size_t i = 1; i < n; ++i) q[i] = (q[i - 1] - a[i]) / r;
    }
    return q;
}

namespace {

// |p^(j)(z)| / j! and the matching rounding scale
std::pair<double, double> taylor_coeff(std::span<const cplx> c, cplx z, int j) {
    cplx s = 0.0;
    double scale = 0.0;
    const double az = std::abs(z);
    for (std::size_t i = j; i < c.size(); ++i) {
        double binom = 1.0;
        for (int t = 0; t < j; ++t) binom = binom * double(i - t) / double(t + 1);
        s += c[i] * binom * std::pow(z, int(i) - j);
        scale += std::abs(c[i]) * binom * std::pow(az, double(i) - j);
    }
    return {std::abs(s), scale};
}

struct Dsu {
    std::vector<int> p;
    explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

std::vector<std::vector<int>> groups_of(Dsu& d, int n) {
    std::map<int, std::vector<int>> g;
    for (int i = 0; i < n; ++i) g[d.find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& kv : g) out.push_back(std::move(kv.second));
    return out;
}

}  // namespace

std::vector<PolyRoot> poly_roots(std::span<const cplx> coeffs) {
    std::vector<cplx> c(coeffs.begin(), coeffs.end());
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.empty()) throw Error(Errc::zero_polynomial, "no roots defined");

    std::vector<PolyRoot> out;
    std::size_t low = 0;
    while (c[low] == 0.0) ++low;
    if (low) out.push_back({0.0, static_cast<int>(low)});
    std::vector<cplx> q(c.begin() + low, c.end());
    const int d = static_cast<int>(q.size()) - 1;
    if (d == 0) return out;

    // balance with z = s y, s the geometric mean root modulus
    const double s = std::pow(std::abs(q[0]) / std::abs(q[d]), 1.0 / d);
    std::vector<cplx> qs(q.size());
    for (int i = 0; i <= d; ++i) qs[i] = q[i] * std::pow(s, i);

    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; ++j) C(0, j) = -qs[d - 1 - j] / qs[d];
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cplx> raw(d);
    for (int i = 0; i < d; ++i) raw[i] = es.eigenvalues()[i] * s;

    auto close = [](cplx a, cplx b, double tol) {
        return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
    };

    // first pass: eigenvalue splitting of multiple roots
    Dsu d1(d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (close(raw[i], raw[j], 1e-7)) d1.unite(i, j);
    std::vector<PolyRoot> cl;
    for (const auto& g : groups_of(d1, d)) {
        cplx m = 0.0;
        for (int i : g) m += raw[i];
        cl.push_back({m / double(g.size()), static_cast<int>(g.size())});
    }

    // second pass: wider clusters accepted only if the Taylor test confirms
    const int nc = static_cast<int>(cl.size());
    Dsu d2(nc);
    for (int i = 0; i < nc; ++i)
        for (int j = i + 1; j < nc; ++j)
            if (close(cl[i].value, cl[j].value, 1e-3)) d2.unite(i, j);
    std::vector<PolyRoot> merged;
    for (const auto& g : groups_of(d2, nc)) {
        if (g.size() == 1) {
            merged.push_back(cl[g[0]]);
            continue;
        }
        cplx m = 0.0;
        int mult = 0;
        for (int i : g) {
            m += cl[i].value * double(cl[i].multiplicity);
            mult += cl[i].multiplicity;
        }
        m /= double(mult);
        bool ok = true;
        for (int j = 0; j < mult && ok; ++j) {
            auto [v, sc] = taylor_coeff(q, m, j);
            ok = v <= 1e-9 * sc;
        }
        if (ok)
            merged.push_back({m, mult});
        else
            for (int i : g) merged.push_back(cl[i]);
    }

    std::vector<cplx> dq(d);
    for (int i = 1; i <= d; ++i) dq[i - 1] = q[i] * double(i);
    for (auto& r : merged) {
        if (r.multiplicity == 1) {
            for (int it = 0; it < 3; ++it) {
                const cplx f = poly_eval(q, r.value), fp = poly_eval(dq, r.value);
                if (fp == 0.0) break;
                const cplx cand = r.value - f / fp;
                if (std::abs(poly_eval(q, cand)) < std::abs(f))
                    r.value = cand;
                else
                    break;
            }
        }
        auto [v, sc] = taylor_coeff(q, r.value, 0);
        if (v > 1e-10 * sc)
            throw Error(Errc::root_residual, "residual " + std::to_string(v / sc) + " at a root");
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const PolyRoot& a, const PolyRoot& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

std::vector<PolyRoot> poly_roots(const ExpPoly& p) {
    if (p.is_zero()) throw Error(Errc::zero_polynomial, "no roots defined");
    const auto c = p.polynomial_coefficients();
    return poly_roots(std::span<const cplx>(c));
}

std::optional<TwistedRational> cancel_common_roots(const TwistedRational& r, double match_tol) {
    auto sn = split_monomial(r.num());
    auto sd = split_monomial(r.den());
    if (!sn || !sd) return std::nullopt;
    std::vector<PolyRoot> rn, rd;
    try {
        rn = poly_roots(std::span<const cplx>(sn->poly));
        rd = poly_roots(std::span<const cplx>(sd->poly));
    } catch (const Error&) {
        return std::nullopt;
    }
    std::vector<cplx> pn = sn->poly, pd = sd->poly;
    bool changed = false;
    std::vector<bool> used(rd.size(), false);
    for (const auto& a : rn) {
        for (std::size_t j = 0; j < rd.size(); ++j) {
            if (used[j]) continue;
            const auto& b = rd[j];
            if (std::abs(a.value - b.value) > match_tol * std::max(1.0, std::abs(a.value))) continue;
            used[j] = true;
            const int common = std::min(a.multiplicity, b.multiplicity);
            const cplx root = a.multiplicity <= b.multiplicity ? a.value : b.value;
            for (int t = 0; t < common; ++t) {
                pn = poly_deflate(pn, root);
                pd = poly_deflate(pd, root);
            }
            changed = true;
            break;
        }
    }
    if (!changed) return r;
    const double al = r.alpha();
    TwistedRational out(ExpPoly::from_polynomial(al, pn).times_monomial(sn->shift),
                        ExpPoly::from_polynomial(al, pd).times_monomial(sd->shift));
    for (int k = 0; k < 5; ++k) {
        const auto p = CoverPoint::on_branch(std::polar(0.83 * (1.0 + 0.1 * k), 0.37 + 1.13 * k), 0);
        try {
            const cplx a = r(p), b = out(p);
            if (std::abs(a - b) > 1e-8 * std::max(1.0, std::abs(a))) return std::nullopt;
        } catch (const Error&) {
        }
    }
    return out;
}

}  // namespace sphcone
