#include "sphcone/quad_diff.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace sphcone {

namespace {

int degree(const std::vector<cplx>& c) {
    int d = static_cast<int>(c.size()) - 1;
    while (d > 0 && c[d] == 0.0) --d;
    return d;
}

std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

}  // namespace

cplx QuadDifferential::operator()(cplx z) const {
    const cplx d = poly_eval(den, z);
    if (d == 0.0) throw Error(Errc::pole, "sigma has a pole here");
    return poly_eval(num, z) / d;
}

int QuadDifferential::pole_order_at_infinity() const { return 4 + degree(num) - degree(den); }

QuadDifferential QuadDifferential::scaled(cplx c) const {
    QuadDifferential q = *this;
    for (auto& x : q.num) x *= c;
    return q;
}

QuadDifferential operator+(const QuadDifferential& a, const QuadDifferential& b) {
    auto n1 = poly_mul(a.num, b.den), n2 = poly_mul(b.num, a.den);
    if (n1.size() < n2.size()) n1.resize(n2.size(), 0.0);
    for (std::size_t i = 0; i < n2.size(); ++i) n1[i] += n2[i];
    return {n1, poly_mul(a.den, b.den)};
}

std::vector<QuadDifferential> qd_basis(std::span<const cplx> pts, bool infinity_is_cone) {
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (std::abs(pts[i] - pts[j]) <= 1e-12 * std::max(1.0, std::abs(pts[i])))
                throw Error(Errc::invalid_input, "repeated cone point");
    const int n = static_cast<int>(pts.size());
    const int d = n + (infinity_is_cone ? 1 : 0) - 3;
    std::vector<QuadDifferential> out;
    if (d <= 0) return out;
    const auto den = poly_from_roots(pts);
    for (int j = 0; j < d; ++j) {
        std::vector<cplx> num(j + 1, 0.0);
        num[j] = 1.0;
        out.push_back({num, den});
    }
    return out;
}

std::vector<QuadDifferential> qd_basis(const std::vector<ConePoint>& cones) {
    std::vector<cplx> pts;
    bool inf = false;
    for (const auto& c : cones) {
        if (c.at_infinity)
            inf = true;
        else
            pts.push_back(c.position);
    }
    return qd_basis(pts, inf);
}

TwistedRational omega_from_sigma(const QuadDifferential& s, const TwistedRational& f) {
    const double al = f.alpha();
    const ExpPoly& N = f.num();
    const ExpPoly& D = f.den();
    const ExpPoly W = N.derivative() * D - N * D.derivative();
    return TwistedRational(ExpPoly::from_polynomial(al, s.num) * D * D, ExpPoly::from_polynomial(al, s.den) * W);
}

double residue_radius(cplx p, std::span<const cplx> others) {
    double r = 0.1;
    for (cplx q : others)
        if (q != p) r = std::min(r, 0.25 * std::abs(q - p));
    return r;
}

namespace {

cplx trapezoid(const QuadDifferential& s, const DevelopingMap& F, const CoverPoint& c, double r, int n) {
    cplx sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const cplx dz = std::polar(r, two_pi * (k + 0.5) / n);
        const CoverPoint q = c.near(c.z + dz);
        const auto j = F.jet(q);
        // sigma / f' = sigma D^2 / W
        sum += s(q.z) * j.D * j.D / j.W * dz;
    }
    return sum / double(n);
}

bool single_valued(const TwistedRational& f) {
    for (const auto* p : {&f.num(), &f.den()})
        for (const auto& kv : p->terms())
            if (kv.first.b != 0) return false;
    return true;
}

}  // namespace

cplx residue_sigma_over_df(const QuadDifferential& s, const TwistedRational& f, cplx p, double radius, int nodes) {
    if (!(radius > 0)) throw Error(Errc::invalid_circle, "radius must be positive");
    const bool sv = single_valued(f);
    if (!sv && radius >= 0.999 * std::abs(p)) throw Error(Errc::invalid_circle, "circle encloses the branch point 0");
    std::vector<cplx> others;
    try {
        for (const auto& c : cone_points(f))
            if (!c.at_infinity) others.push_back(c.position);
    } catch (const Error&) {
    }
    if (degree(s.den) > 0)
        for (const auto& r : poly_roots(std::span<const cplx>(s.den))) others.push_back(r.value);
    for (cplx q : others) {
        const double d = std::abs(q - p);
        if (d > 1e-9 * std::max(1.0, std::abs(p)) && d < 1.05 * radius)
            throw Error(Errc::invalid_circle, "another singular point lies inside the circle");
    }
    DevelopingMap F(f);
    cplx r1, r2;
    if (p == 0.0) {
        // single-valued f: any lift will do
        auto run = [&](double r) {
            cplx sum = 0.0;
            for (int k = 0; k < nodes; ++k) {
                const cplx dz = std::polar(r, two_pi * (k + 0.5) / nodes);
                const auto j = F.jet(CoverPoint::on_branch(dz, 0));
                sum += s(dz) * j.D * j.D / j.W * dz;
            }
            return sum / double(nodes);
        };
        r1 = run(radius);
        r2 = run(0.5 * radius);
    } else {
        const CoverPoint c = CoverPoint::on_branch(p, 0);
        r1 = trapezoid(s, F, c, radius, nodes);
        r2 = trapezoid(s, F, c, 0.5 * radius, nodes);
    }
    if (std::abs(r1 - r2) > 1e-8 * std::max(1.0, std::abs(r1)))
        throw Error(Errc::quadrature_unresolved,
                    "radius r and r/2 disagree by " + std::to_string(std::abs(r1 - r2)));
    return r1;
}

std::vector<ConeResidue> integer_residues(const QuadDifferential& s, const TwistedRational& f,
                                          const std::vector<ConePoint>& cones) {
    std::vector<cplx> pts{0.0};
    for (const auto& c : cones)
        if (!c.at_infinity) pts.push_back(c.position);
    std::vector<ConeResidue> out;
    for (const auto& c : cones) {
        if (c.at_infinity || !c.is_integer || c.position == 0.0) continue;
        double r = residue_radius(c.position, pts);
        r = std::min(r, 0.25 * std::abs(c.position));
        out.push_back({c.position, c.angle, residue_sigma_over_df(s, f, c.position, r)});
    }
    return out;
}

// ------------------------------------------------------------------- scan

namespace {

struct Eval {
    bool ok = false;
    cplx residue = 0.0;
    cplx point = 0.0;
};

Eval residue_at(const std::function<TwistedRational(double)>& family, double b, const ScanOptions& opt,
                std::optional<cplx> previous) {
    Eval e;
    try {
        const auto f = family(b);
        const auto cones = cone_points(f);
        const auto basis = qd_basis(cones);
        if (static_cast<int>(basis.size()) <= opt.basis_index) return e;
        std::vector<cplx> ints, pts{0.0};
        for (const auto& c : cones) {
            if (c.at_infinity) continue;
            pts.push_back(c.position);
            if (c.is_integer && c.position != 0.0) ints.push_back(c.position);
        }
        if (ints.empty()) return e;
        cplx p = ints.front();
        if (previous)
            for (cplx q : ints)
                if (std::abs(q - *previous) < std::abs(p - *previous)) p = q;
        const double r = std::min(residue_radius(p, pts), 0.25 * std::abs(p));
        e.residue = residue_sigma_over_df(basis[opt.basis_index], f, p, r);
        e.point = p;
        e.ok = true;
    } catch (const Error&) {
    }
    return e;
}

bool all_integer_residues_vanish(const std::function<TwistedRational(double)>& family, double b,
                                 const ScanOptions& opt, double& worst) {
    const auto f = family(b);
    const auto cones = cone_points(f);
    const auto basis = qd_basis(cones);
    worst = 0;
    for (const auto& r : integer_residues(basis.at(opt.basis_index), f, cones))
        worst = std::max(worst, std::abs(r.residue));
    return worst <= opt.zero_tol;
}

}  // namespace

AdmissibleScan find_admissible(const std::function<TwistedRational(double)>& family, double lo, double hi,
                               const ScanOptions& opt) {
    if (!(hi > lo) || opt.samples < 3) throw Error(Errc::invalid_input, "bad scan range");
    AdmissibleScan out;
    auto excluded = [&](double b) {
        return std::any_of(opt.excluded.begin(), opt.excluded.end(),
                           [&](double x) { return std::abs(b - x) <= opt.exclusion_radius; });
    };
    std::vector<Eval> ev(opt.samples);
    std::optional<cplx> prev;
    for (int i = 0; i < opt.samples; ++i) {
        const double b = lo + (hi - lo) * i / (opt.samples - 1);
        if (!excluded(b)) ev[i] = residue_at(family, b, opt, prev);
        if (ev[i].ok) prev = ev[i].point;
        out.samples.push_back({b, ev[i].ok ? std::abs(ev[i].residue) : 0.0, ev[i].ok});
    }
    for (int i = 0; i < opt.samples; ++i) {
        if (!ev[i].ok) continue;
        const bool left = i == 0 || !ev[i - 1].ok || std::abs(ev[i].residue) <= std::abs(ev[i - 1].residue);
        const bool right =
            i + 1 == opt.samples || !ev[i + 1].ok || std::abs(ev[i].residue) <= std::abs(ev[i + 1].residue);
        if (!left || !right) continue;
        const int il = (i > 0 && ev[i - 1].ok) ? i - 1 : i, ir = (i + 1 < opt.samples && ev[i + 1].ok) ? i + 1 : i;
        double a = out.samples[il].b, c = out.samples[ir].b;
        const cplx d = ev[ir].residue - ev[il].residue;
        cplx track = ev[il].point;
        auto g = [&](double b, bool& ok) {
            auto e = residue_at(family, b, opt, track);
            ok = e.ok;
            return ok ? (std::conj(d) * e.residue).real() : 0.0;
        };
        bool oka = false, okc = false;
        double ga = g(a, oka), gc = g(c, okc);
        double root = out.samples[i].b;
        if (oka && okc && ga * gc < 0) {
            for (int it = 0; it < 200 && c - a > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
                const double m = 0.5 * (a + c);
                bool okm = false;
                const double gm = g(m, okm);
                if (!okm) break;
                if ((gm < 0) == (ga < 0)) {
                    a = m;
                    ga = gm;
                } else {
                    c = m;
                }
            }
            root = 0.5 * (a + c);
        } else if (!(ga == 0 || gc == 0)) {
            continue;  // minimum of |R| that is not a zero
        }
        if (excluded(root)) continue;
        const auto e = residue_at(family, root, opt, track);
        if (!e.ok || std::abs(e.residue) > opt.zero_tol) {
            std::ostringstream nm;
            nm << "local minimum near b = " << root << " with |residue| = " << (e.ok ? std::abs(e.residue) : -1.0)
               << " rejected";
            out.notes.push_back(nm.str());
            continue;
        }
        double worst = 0;
        if (!all_integer_residues_vanish(family, root, opt, worst)) {
            std::ostringstream nm;
            nm << "b = " << root << " rejected: another integer cone point has residue " << worst;
            out.notes.push_back(nm.str());
            continue;
        }
        if (out.roots.empty() || std::abs(out.roots.back() - root) > 1e-6) out.roots.push_back(root);
    }
    return out;
}

}  // namespace sphcone
