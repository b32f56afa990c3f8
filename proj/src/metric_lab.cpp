#include "sphcone/metric_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sphcone/parallel.hpp"

namespace sphcone {

DevelopingMap::DevelopingMap(TwistedRational f)
    : f_(std::move(f)), dN_(f_.num().derivative()), dD_(f_.den().derivative()) {}

DevelopingMap::Jet DevelopingMap::jet(const CoverPoint& p) const {
    const cplx N = f_.num()(p), D = f_.den()(p);
    return {N, D, dN_(p) * D - N * dD_(p)};
}

Vec3 DevelopingMap::phi(const CoverPoint& p) const {
    const auto j = jet(p);
    const double s = std::norm(j.N) + std::norm(j.D);
    if (s == 0.0) throw Error(Errc::pole, "numerator and denominator vanish together");
    const cplx nd = j.N * std::conj(j.D);
    return Vec3(2 * nd.real(), 2 * nd.imag(), std::norm(j.N) - std::norm(j.D)) / s;
}

CVec3 DevelopingMap::phi_z(const CoverPoint& p) const {
    const auto j = jet(p);
    const double s = std::norm(j.N) + std::norm(j.D);
    if (s == 0.0) throw Error(Errc::pole, "numerator and denominator vanish together");
    const cplx Db2 = std::conj(j.D * j.D), Nb2 = std::conj(j.N * j.N);
    return CVec3(Db2 - Nb2, -I * (Db2 + Nb2), 2.0 * std::conj(j.N * j.D)) * (j.W / (s * s));
}

double DevelopingMap::density(const CoverPoint& p) const {
    const auto j = jet(p);
    const double s = std::norm(j.N) + std::norm(j.D);
    if (s == 0.0) throw Error(Errc::pole, "numerator and denominator vanish together");
    return 4 * std::norm(j.W) / (s * s);
}

Vec3 stereographic(const TwistedRational& f, cplx z, int branch) {
    return DevelopingMap(f).phi(CoverPoint::on_branch(z, branch));
}

double metric_density(const TwistedRational& f, cplx z, int branch) {
    return DevelopingMap(f).density(CoverPoint::on_branch(z, branch));
}

bool is_integer_angle(double beta) { return std::abs(beta - std::round(beta)) <= 1e-9; }

// ---------------------------------------------------------------- cones

namespace {

// exponent value -> summed coefficient (terms with equal a + b alpha are the
// same function on any fixed sheet)
std::vector<std::pair<double, cplx>> exponent_groups(const ExpPoly& p) {
    std::vector<std::pair<double, cplx>> g;
    for (const auto& [e, c] : p.terms()) g.emplace_back(p.exponent_value(e), c);
    std::sort(g.begin(), g.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<double, cplx>> out;
    for (const auto& [e, c] : g) {
        if (!out.empty() && std::abs(out.back().first - e) <= 1e-12 * std::max(1.0, std::abs(e)))
            out.back().second += c;
        else
            out.emplace_back(e, c);
    }
    return out;
}

// order of f - f(endpoint) at 0 (lowest) or at infinity (highest), as a
// positive multiple of 2 pi
double end_angle(const ExpPoly& N, const ExpPoly& D, bool lowest) {
    auto gN = exponent_groups(N), gD = exponent_groups(D);
    if (!lowest) {
        std::reverse(gN.begin(), gN.end());
        std::reverse(gD.begin(), gD.end());
    }
    auto first_nonzero = [](const std::vector<std::pair<double, cplx>>& g) {
        for (const auto& x : g)
            if (x.second != 0.0) return x;
        throw Error(Errc::zero_polynomial, "all exponent groups cancel");
    };
    const auto [eN, cN] = first_nonzero(gN);
    const auto [eD, cD] = first_nonzero(gD);
    if (std::abs(eN - eD) > 1e-12) return std::abs(eN - eD);
    // finite nonzero value at the end point: look at f - c0
    const cplx c0 = cN / cD;
    std::map<double, std::pair<cplx, double>> m;  // e -> (coefficient, scale)
    auto key = [](double e) { return std::round(e * 1e9) / 1e9; };
    for (const auto& [e, c] : gN) {
        auto& s = m[key(e)];
        s.first += c;
        s.second += std::abs(c);
    }
    for (const auto& [e, c] : gD) {
        auto& s = m[key(e)];
        s.first -= c0 * c;
        s.second += std::abs(c0 * c);
    }
    std::vector<double> live;
    for (const auto& [e, s] : m)
        if (std::abs(s.first) > 1e-12 * s.second) live.push_back(e);
    if (live.empty()) throw Error(Errc::outside_family, "constant developing map");
    const double eM = lowest ? live.front() : live.back();
    return std::abs(eM - eD);
}

}  // namespace

std::vector<ConePoint> cone_points(const TwistedRational& f0) {
    TwistedRational f = f0;
    if (auto c = cancel_common_roots(f0)) f = *c;
    const ExpPoly& N = f.num();
    const ExpPoly& D = f.den();
    if (N.is_zero()) throw Error(Errc::outside_family, "zero developing map");
    const ExpPoly W = N.derivative() * D - N * D.derivative();
    if (W.is_zero()) throw Error(Errc::outside_family, "constant developing map");
    auto sw = split_monomial(W);
    auto sd = split_monomial(D);
    if (!sw || !sd) throw Error(Errc::outside_family, "f' is not a monomial times a polynomial in z");

    std::vector<ConePoint> out;
    const double a0 = end_angle(N, D, true);
    if (std::abs(a0 - 1.0) > 1e-9) out.push_back({false, 0.0, a0, is_integer_angle(a0)});

    const auto wr = poly_roots(std::span<const cplx>(sw->poly));
    std::vector<PolyRoot> dr;
    if (sd->poly.size() > 1) dr = poly_roots(std::span<const cplx>(sd->poly));
    std::vector<ConePoint> finite;
    for (const auto& r : wr) {
        int pole_order = 0;
        for (const auto& d : dr)
            if (std::abs(d.value - r.value) <= 1e-7 * std::max(1.0, std::abs(r.value))) pole_order = d.multiplicity;
        const double beta = pole_order > 0 ? double(pole_order) : double(r.multiplicity + 1);
        if (beta != 1.0) finite.push_back({false, r.value, beta, true});
    }
    std::sort(finite.begin(), finite.end(), [](const ConePoint& a, const ConePoint& b) {
        if (a.position.real() != b.position.real()) return a.position.real() < b.position.real();
        return a.position.imag() < b.position.imag();
    });
    out.insert(out.end(), finite.begin(), finite.end());

    const double ainf = end_angle(N, D, false);
    if (std::abs(ainf - 1.0) > 1e-9) out.push_back({true, 0.0, ainf, is_integer_angle(ainf)});
    return out;
}

ConicalMetric make_metric(TwistedRational f) {
    auto cones = cone_points(f);
    return {std::move(f), std::move(cones)};
}

// ----------------------------------------------------------- candidates

EigenCandidate::EigenCandidate(std::string name, Rule rule, bool single_valued, Patch patch)
    : name_(std::move(name)), rule_(std::move(rule)), single_valued_(single_valued), patch_(std::move(patch)) {}

EigenCandidate EigenCandidate::real_part() const {
    Rule r = rule_;
    Patch pt;
    if (patch_) {
        Patch inner = patch_;
        pt = [inner](const CoverPoint& c) -> Rule {
            Rule local = inner(c);
            return [local](const CoverPoint& p) { return cplx(local(p).real(), 0.0); };
        };
    }
    return EigenCandidate("Re " + name_, [r](const CoverPoint& p) { return cplx(r(p).real(), 0.0); }, single_valued_,
                          pt);
}

EigenCandidate EigenCandidate::imag_part() const {
    Rule r = rule_;
    Patch pt;
    if (patch_) {
        Patch inner = patch_;
        pt = [inner](const CoverPoint& c) -> Rule {
            Rule local = inner(c);
            return [local](const CoverPoint& p) { return cplx(local(p).imag(), 0.0); };
        };
    }
    return EigenCandidate("Im " + name_, [r](const CoverPoint& p) { return cplx(r(p).imag(), 0.0); }, single_valued_,
                          pt);
}

EigenCandidate support_candidate(const DevelopingMap& f, const Vec3& s) {
    std::ostringstream nm;
    nm << "(phi, [" << s(0) << "," << s(1) << "," << s(2) << "])";
    return EigenCandidate(nm.str(), [f, s](const CoverPoint& p) { return cplx(f.phi(p).dot(s), 0.0); }, false);
}

// --------------------------------------------------------------- residual

namespace {

cplx laplacian(const EigenCandidate::Rule& u, const CoverPoint& p, cplx u0, double h) {
    const cplx z = p.z;
    return (u(p.near(z + h)) + u(p.near(z - h)) + u(p.near(z + I * h)) + u(p.near(z - I * h)) - 4.0 * u0) / (h * h);
}

// u_{z zbar}
cplx u_zzbar(const EigenCandidate::Rule& u, const CoverPoint& p, cplx u0, const ResidualOptions& opt) {
    const cplx L1 = laplacian(u, p, u0, opt.h);
    if (opt.stencil == Stencil::second_order) return 0.25 * L1;
    const cplx L2 = laplacian(u, p, u0, 2 * opt.h);
    return 0.25 * (4.0 * L1 - L2) / 3.0;
}

// fourth-order centered first derivatives of the real part
std::pair<double, double> gradient(const EigenCandidate::Rule& u, const CoverPoint& p, double h) {
    const cplx z = p.z;
    auto d = [&](cplx dir) {
        const double a = u(p.near(z + dir * h)).real(), b = u(p.near(z - dir * h)).real();
        const double a2 = u(p.near(z + 2.0 * dir * h)).real(), b2 = u(p.near(z - 2.0 * dir * h)).real();
        return (8 * (a - b) - (a2 - b2)) / (12 * h);
    };
    return {d(1.0), d(I)};
}

Vec3 x_with_rule(const EigenCandidate::Rule& u, const DevelopingMap& f, const CoverPoint& p, double h) {
    const auto [ux, uy] = gradient(u, p, h);
    const cplx uz = 0.5 * cplx(ux, -uy);
    const CVec3 pz = f.phi_z(p);
    const double q = pz.squaredNorm();
    Vec3 grad;
    for (int i = 0; i < 3; ++i) grad(i) = 2 * (uz * std::conj(pz(i))).real();
    return u(p).real() * f.phi(p) + grad / q;
}

}  // namespace

double eigen_residual(const EigenCandidate& u, const DevelopingMap& f, const CoverPoint& p,
                      const ResidualOptions& opt) {
    const auto rule = u.patch(p);
    const cplx u0 = rule(p);
    const cplx lap = u_zzbar(rule, p, u0, opt);
    return std::abs(u0 + lap / f.phi_z_sq(p));
}

double eigen_residual(const EigenCandidate& u, const TwistedRational& f, cplx z, int branch, double h) {
    return eigen_residual(u, DevelopingMap(f), CoverPoint::on_branch(z, branch), ResidualOptions{h});
}

// ------------------------------------------------------------------ grids

Grid parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    auto num = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            double v = std::stod(parts.at(i), &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw Error(Errc::invalid_input, "bad grid spec '" + spec + "'");
        }
    };
    Grid g{spec, {}};
    if (!parts.empty() && parts[0] == "annulus" && parts.size() == 4) {
        const double r0 = num(1), r1 = num(2);
        const int n = static_cast<int>(num(3));
        if (r0 <= 0 || r1 <= r0 || n < 1) throw Error(Errc::invalid_input, "bad annulus '" + spec + "'");
        for (int i = 0; i < n; ++i) {
            const double r = n == 1 ? 0.5 * (r0 + r1) : r0 + (r1 - r0) * i / (n - 1);
            for (int j = 0; j < n; ++j) g.points.push_back(std::polar(r, -pi + two_pi * (j + 0.5) / n));
        }
        return g;
    }
    if (!parts.empty() && parts[0] == "rect" && parts.size() == 6) {
        const double x0 = num(1), x1 = num(2), y0 = num(3), y1 = num(4);
        const int n = static_cast<int>(num(5));
        if (x1 <= x0 || y1 <= y0 || n < 1) throw Error(Errc::invalid_input, "bad rectangle '" + spec + "'");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g.points.emplace_back(x0 + (x1 - x0) * (i + 0.5) / n, y0 + (y1 - y0) * (j + 0.5) / n);
        return g;
    }
    throw Error(Errc::invalid_input, "bad grid spec '" + spec + "'");
}

Grid exclude_points(const Grid& g, const std::vector<ConePoint>& cones, double radius, double cut) {
    Grid out{g.spec, {}};
    for (cplx z : g.points) {
        bool keep = std::abs(z) > radius;
        for (const auto& c : cones)
            if (!c.at_infinity && std::abs(z - c.position) <= radius) keep = false;
        if (z.real() < 0 && std::abs(z.imag()) <= cut) keep = false;
        if (keep) out.points.push_back(z);
    }
    return out;
}

VerifyReport verify_grid(const EigenCandidate& u, const DevelopingMap& f, std::span<const cplx> pts,
                         const ResidualOptions& opt, double rel_tol, int branch) {
    std::vector<double> res(pts.size()), mag(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        const auto p = CoverPoint::on_branch(pts[i], branch);
        res[i] = eigen_residual(u, f, p, opt);
        mag[i] = std::abs(u(p));
    });
    VerifyReport r;
    r.points = pts.size();
    r.h = opt.h;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (res[i] > r.max_residual || i == 0) {
            r.max_residual = res[i];
            r.worst_point = pts[i];
        }
        r.sup_u = std::max(r.sup_u, mag[i]);
    }
    r.tolerance = rel_tol * (1 + r.sup_u);
    r.pass = r.max_residual <= r.tolerance;
    return r;
}

double single_valuedness(const EigenCandidate& u, std::span<const cplx> pts) {
    double worst = 0;
    for (cplx z : pts)
        worst = std::max(worst, std::abs(u(CoverPoint::on_branch(z, 0)) - u(CoverPoint::on_branch(z, 1))));
    return worst;
}

Vec3 x_from_u(const EigenCandidate& u, const DevelopingMap& f, const CoverPoint& p, double h) {
    return x_with_rule(u.patch(p), f, p, h);
}

ConformalityCheck check_x_conformal(const EigenCandidate& u, const DevelopingMap& f, const CoverPoint& p, double h) {
    const auto rule = u.patch(p);
    auto X = [&](cplx dz) { return x_with_rule(rule, f, p.near(p.z + dz), h); };
    auto d = [&](cplx dir) -> Vec3 {
        return (8 * (X(dir * h) - X(-dir * h)) - (X(2.0 * dir * h) - X(-2.0 * dir * h))) / (12 * h);
    };
    const Vec3 Xx = d(1.0), Xy = d(I);
    const CVec3 Xz = 0.5 * (Xx.cast<cplx>() - I * Xy.cast<cplx>());
    const CVec3 pzb = f.phi_z(p).conjugate();
    ConformalityCheck c;
    c.X = x_with_rule(rule, f, p, h);
    c.isotropy = std::abs(Xz.cwiseProduct(Xz).sum());
    const double n2 = Xz.squaredNorm();
    c.isotropy_rel = n2 > 0 ? c.isotropy / n2 : 0.0;
    const double cosv = n2 > 0 ? std::abs(pzb.dot(Xz)) / std::sqrt(n2 * pzb.squaredNorm()) : 1.0;
    c.gauss_sine = std::sqrt(std::max(0.0, 1 - cosv * cosv));
    return c;
}

double gram_remainder(const EigenCandidate& u, const DevelopingMap& f, std::span<const cplx> pts, int branch) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto p = CoverPoint::on_branch(pts[i], branch);
        A.row(i) = f.phi(p).transpose();
        b(i) = u(p).real();
    }
    const double nb = b.norm();
    if (nb == 0.0) return 0.0;
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return (b - A * c).norm() / nb;
}

}  // namespace sphcone
