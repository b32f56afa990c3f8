#include "sphcone/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

namespace sphcone {

namespace {

std::vector<cplx> denominator_roots(const TwistedRational& r) {
    std::vector<cplx> out;
    auto sd = split_monomial(r.den());
    if (!sd || sd->poly.size() < 2) return out;
    for (const auto& x : poly_roots(std::span<const cplx>(sd->poly))) out.push_back(x.value);
    return out;
}

void factor_denominator(WeierstrassData& d) {
    auto sd = split_monomial(d.weight.den());
    if (!sd) return;
    d.den_shift = sd->shift;
    d.den_lead = sd->poly.back();
    if (sd->poly.size() >= 2) d.den_roots = poly_roots(std::span<const cplx>(sd->poly));
    for (const auto& r : d.den_roots) d.singular.push_back(r.value);
}

TwistedRational reduced(const TwistedRational& r) {
    if (auto c = cancel_common_roots(r)) return *c;
    return r;
}

}  // namespace

WeierstrassData make_weierstrass(const TwistedRational& f, const TwistedRational& omega, cplx z0) {
    if (omega.alpha() != f.alpha()) throw Error(Errc::alpha_mismatch, "omega and f use different alpha");
    WeierstrassData d{f, omega, reduced(TwistedRational(omega.num(), omega.den() * f.den() * f.den())), z0,
                      Vec3::Zero(), {}, {}, {}, 0.0};
    factor_denominator(d);
    return d;
}

WeierstrassData make_weierstrass(const TwistedRational& f, const QuadDifferential& sigma, cplx z0) {
    const double al = f.alpha();
    const ExpPoly W = f.num().derivative() * f.den() - f.num() * f.den().derivative();
    WeierstrassData d{f, omega_from_sigma(sigma, f),
                      reduced(TwistedRational(ExpPoly::from_polynomial(al, sigma.num),
                                              ExpPoly::from_polynomial(al, sigma.den) * W)),
                      z0, Vec3::Zero(), {}, {}, {}, 0.0};
    factor_denominator(d);
    return d;
}

std::vector<cplx> misplaced_poles(const WeierstrassData& d, const std::vector<ConePoint>& cones) {
    std::vector<cplx> bad;
    for (const auto& form : {reduced(d.omega), reduced(d.f * d.f * d.omega)}) {
        for (cplx p : denominator_roots(form)) {
            if (std::any_of(bad.begin(), bad.end(), [&](cplx q) { return std::abs(q - p) < 1e-9 * std::max(1.0, std::abs(p)); }))
                continue;
            bool ok = false;
            for (const auto& c : cones)
                if (!c.at_infinity && c.is_integer && std::abs(c.position - p) <= 1e-6 * std::max(1.0, std::abs(p)))
                    ok = true;
            if (!ok) bad.push_back(p);
        }
    }
    return bad;
}

cplx weight_at(const WeierstrassData& d, const CoverPoint& q) {
    if (d.den_lead == 0.0) return d.weight(q);
    cplx den = d.den_lead * std::pow(q.z, d.den_shift.a) * std::exp(d.f.alpha() * d.den_shift.b * q.log);
    for (const auto& r : d.den_roots) {
        const cplx t = q.z - r.value;
        if (t == 0.0) throw Error(Errc::pole, "integrand pole");
        den *= std::pow(t, r.multiplicity);
    }
    return d.weight.num()(q) / den;
}

// ------------------------------------------------------------ quadrature

namespace {

using GL = boost::math::quadrature::gauss<double, 20>;

struct Integrand {
    const WeierstrassData& d;
    // Near a pole of order m the integrand cannot be evaluated better than
    // ~ m eps |z| / dist: z itself is only known to eps |z|.
    double rel_floor(cplx a, cplx b, double rel) const {
        const cplx mid = 0.5 * (a + b);
        const double half = 0.5 * std::abs(b - a);
        for (const auto& r : d.den_roots) {
            const double dist = std::max(std::abs(mid - r.value) - half, 1e-300);
            rel = std::max(rel, 64 * r.multiplicity * std::numeric_limits<double>::epsilon() * std::abs(mid) / dist);
        }
        return rel;
    }
    CVec3 operator()(const CoverPoint& q) const {
        const cplx N = d.f.num()(q), D = d.f.den()(q), w = weight_at(d, q);
        const cplx D2 = D * D, N2 = N * N;
        return CVec3(D2 - N2, I * (D2 + N2), 2.0 * N * D) * w;
    }
};

CVec3 gauss(const Integrand& F, const CoverPoint& a, cplx b) {
    const cplx mid = 0.5 * (a.z + b), half = 0.5 * (b - a.z);
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    CVec3 s = CVec3::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += w[i] * (F(a.near(mid + half * x[i])) + F(a.near(mid - half * x[i])));
    }
    return s * half;
}

CVec3 adaptive(const Integrand& F, const CoverPoint& a, cplx b, const PathOptions& opt) {
    struct Job {
        CoverPoint a;
        cplx b;
        double tol;
        int depth;
        CVec3 whole;
    };
    std::vector<Job> work{{a, b, opt.abs_tol, 0, gauss(F, a, b)}};
    CVec3 total = CVec3::Zero();
    long count = 0;
    while (!work.empty()) {
        Job j = work.back();
        work.pop_back();
        const cplx m = 0.5 * (j.a.z + j.b);
        const CoverPoint am = j.a.near(m);
        const CVec3 left = gauss(F, j.a, m), right = gauss(F, am, j.b);
        const CVec3 both = left + right;
        if ((both - j.whole).norm() <= std::max(j.tol, F.rel_floor(j.a.z, j.b, opt.rel_tol) * both.norm())) {
            total += both;
            continue;
        }
        if (j.depth >= opt.max_depth || ++count > opt.max_intervals)
            throw Error(Errc::integration_unresolved, "adaptive subdivision limit reached");
        work.push_back({am, j.b, 0.5 * j.tol, j.depth + 1, right});
        work.push_back({j.a, m, 0.5 * j.tol, j.depth + 1, left});
    }
    return total;
}

double segment_distance(cplx a, cplx b, cplx p) {
    const cplx d = b - a;
    const double L2 = std::norm(d);
    if (L2 == 0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0);
    return std::abs(a + t * d - p);
}

// integrate the straight piece a -> b; returns the lift of b
CoverPoint piece(const WeierstrassData& d, const CoverPoint& a, cplx b, const PathOptions& opt, CVec3& acc) {
    const double scale = std::max({1.0, std::abs(a.z), std::abs(b)});
    if (segment_distance(a.z, b, 0.0) <= 1e-14 * scale)
        throw Error(Errc::singular_path, "path passes through 0");
    for (cplx s : d.singular)
        if (segment_distance(a.z, b, s) <= 1e-12 * scale) throw Error(Errc::singular_path, "path hits a pole");
    if (a.z == b) return a;
    // Pre-split so that no piece is long compared with its distance to 0 or
    // a pole: otherwise all nodes of both levels can miss a sharp region near
    // one end and agree on a wrong value.
    const Integrand F{d};
    const cplx dir = (b - a.z) / std::abs(b - a.z);
    CoverPoint cur = a;
    while (cur.z != b) {
        double room = std::abs(cur.z);
        for (cplx s : d.singular) room = std::min(room, std::abs(cur.z - s));
        const double left = std::abs(b - cur.z);
        const cplx nxt = 0.5 * room >= left ? b : cur.z + 0.5 * room * dir;
        acc += adaptive(F, cur, nxt, opt);
        cur = cur.near(nxt);
    }
    return cur;
}

double detour_radius(const WeierstrassData& d, cplx s) {
    double r = std::min(0.05, 0.3 * std::abs(s));
    for (cplx t : d.singular)
        if (t != s) r = std::min(r, 0.3 * std::abs(t - s));
    return r;
}

void arc_points(Polyline& out, cplx s, double r, double th1, double th2) {
    const double dth = std::remainder(th2 - th1, two_pi);
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(dth) / (pi / 16))));
    for (int k = 1; k < n; ++k) out.push_back(s + std::polar(r, th1 + dth * k / n));
}

// straight segment with detours around integrand poles (shorter way round)
Polyline route(const WeierstrassData& d, cplx a, cplx b) {
    struct Hit {
        cplx s;
        double t;
    };
    std::vector<Hit> hits;
    const cplx dir = b - a;
    const double L2 = std::norm(dir);
    for (cplx s : d.singular) {
        const double rad = detour_radius(d, s);
        if (segment_distance(a, b, s) >= rad) continue;
        const double t = L2 > 0 ? ((s - a) * std::conj(dir)).real() / L2 : 0.0;
        hits.push_back({s, t});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.t < y.t; });
    Polyline out{a};
    for (const auto& h : hits) {
        const cplx s = h.s;
        const double r = detour_radius(d, s);
        const bool a_in = std::abs(a - s) < r, b_in = std::abs(b - s) < r;
        // intersections of the line with |z - s| = r
        const cplx f = a - s;
        const double B = 2 * (f * std::conj(dir)).real(), C = std::norm(f) - r * r;
        const double disc = std::max(0.0, B * B - 4 * L2 * C);
        const double t1 = (-B - std::sqrt(disc)) / (2 * L2), t2 = (-B + std::sqrt(disc)) / (2 * L2);
        const cplx entry = a + t1 * dir, exit = a + t2 * dir;
        if (!a_in && !b_in) {
            out.push_back(entry);
            arc_points(out, s, r, std::arg(entry - s), std::arg(exit - s));
            out.push_back(exit);
        } else if (a_in && !b_in) {
            const cplx o = s + r * (a - s) / std::abs(a - s);
            out.push_back(o);
            arc_points(out, s, r, std::arg(o - s), std::arg(exit - s));
            out.push_back(exit);
        } else if (!a_in && b_in) {
            out.push_back(entry);
            const cplx o = s + r * (b - s) / std::abs(b - s);
            arc_points(out, s, r, std::arg(entry - s), std::arg(o - s));
            out.push_back(o);
        } else if (segment_distance(a, b, s) < 0.5 * std::min(std::abs(a - s), std::abs(b - s))) {
            const cplx o1 = s + r * (a - s) / std::abs(a - s), o2 = s + r * (b - s) / std::abs(b - s);
            out.push_back(o1);
            arc_points(out, s, r, std::arg(o1 - s), std::arg(o2 - s));
            out.push_back(o2);
        }
    }
    out.push_back(b);
    return out;
}

}  // namespace

PathState path_state(const WeierstrassData& d, const Polyline& path, int branch, const PathOptions& opt) {
    if (path.empty()) throw Error(Errc::invalid_input, "empty path");
    PathState st;
    st.path = path;
    CoverPoint cur = CoverPoint::on_branch(path.front(), branch);
    for (std::size_t i = 1; i < path.size(); ++i) cur = piece(d, cur, path[i], opt, st.integral);
    st.end = cur;
    st.branch = cur.branch();
    return st;
}

Vec3 path_integrate(const WeierstrassData& d, const Polyline& path, int branch, const PathOptions& opt) {
    return 0.5 * path_state(d, path, branch, opt).integral.real();
}

ClosureResult closure_solve(const WeierstrassData& d, const std::vector<GeneratorLoop>& loops,
                            const std::vector<Mat3>& so3, const PathOptions& opt) {
    if (loops.size() != so3.size()) throw Error(Errc::invalid_input, "one monodromy matrix per loop");
    ClosureResult out;
    const auto n = static_cast<Eigen::Index>(loops.size());
    if (n == 0) return out;
    Eigen::MatrixXd B(3 * n, 3);
    Eigen::VectorXd v(3 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(loops[i].path.front() - d.z0) > 1e-12 * std::max(1.0, std::abs(d.z0)))
            throw Error(Errc::invalid_input, "loops must start at the base point");
        const Vec3 p = path_integrate(d, loops[i].path, 0, opt);
        out.periods.push_back(p);
        B.block(3 * i, 0, 3, 3) = so3[i] - Mat3::Identity();
        v.segment(3 * i, 3) = p;
    }
    // monodromies carry ~1e-13 noise; without a threshold it would pin the axis component
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(B);
    cod.setThreshold(1e-8);
    out.X0 = cod.solve(v);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = ((so3[i] - Mat3::Identity()) * out.X0 - out.periods[i]).norm();
        out.loop_residuals.push_back(r);
        out.residual = std::max(out.residual, r);
        if ((so3[i] - Mat3::Identity()).norm() > 1e-8) {
            Eigen::JacobiSVD<Mat3> svd(so3[i] - Mat3::Identity(), Eigen::ComputeFullV);
            const double ax = std::abs(svd.matrixV().col(2).dot(out.periods[i]));
            out.axis_components.push_back(ax);
            if (ax > 1e-8) out.axis_consistent = false;
        } else {
            out.axis_components.push_back(out.periods[i].norm());
            if (out.periods[i].norm() > 1e-8) out.axis_consistent = false;
        }
    }
    return out;
}

// ------------------------------------------------------------- the field

SupportField::SupportField(WeierstrassData d, const PathOptions& opt) : d_(std::move(d)), opt_(opt) {
    r0_ = std::abs(d_.z0);
    th0_ = std::arg(d_.z0);
    step_ = pi / 32;
    J_ = 128;  // two turns either way
    trunk_.assign(2 * J_ + 1, CVec3::Zero());
    auto node = [&](int j) { return CoverPoint::from_log(cplx(std::log(r0_), th0_ + (j - J_) * step_)); };
    for (int j = J_ + 1; j <= 2 * J_; ++j) trunk_[j] = trunk_[j - 1] + leg(node(j - 1), node(j));
    for (int j = J_ - 1; j >= 0; --j) trunk_[j] = trunk_[j + 1] + leg(node(j + 1), node(j));
}

CVec3 SupportField::leg(const CoverPoint& a, const CoverPoint& b) const {
    const Polyline pts = route(d_, a.z, b.z);
    CVec3 acc = CVec3::Zero();
    CoverPoint cur = a;
    for (std::size_t i = 1; i < pts.size(); ++i) cur = piece(d_, cur, pts[i], opt_, acc);
    return acc;
}

CVec3 SupportField::integral(const CoverPoint& q) const {
    const double th = q.log.imag();
    const double lr0 = std::log(r0_);
    long j = std::lround((th - th0_) / step_) + J_;
    CVec3 acc;
    CoverPoint from;
    if (j >= 0 && j <= 2 * J_) {
        acc = trunk_[j];
        from = CoverPoint::from_log(cplx(lr0, th0_ + (j - J_) * step_));
    } else {
        // beyond the cache: walk on from its end
        const int e = j < 0 ? 0 : 2 * J_;
        const int dir = j < 0 ? -1 : 1;
        acc = trunk_[e];
        from = CoverPoint::from_log(cplx(lr0, th0_ + (e - J_) * step_));
        for (long k = e + dir; k != j + dir; k += dir) {
            const auto nxt = CoverPoint::from_log(cplx(lr0, th0_ + (k - J_) * step_));
            acc += leg(from, nxt);
            from = nxt;
        }
    }
    const auto P = CoverPoint::from_log(cplx(lr0, th));
    acc += leg(from, P);
    acc += leg(P, q);
    return acc;
}

EigenCandidate support_function(std::shared_ptr<const SupportField> field, const DevelopingMap& f) {
    EigenCandidate::Rule rule = [field, f](const CoverPoint& q) {
        return cplx(field->X(q).dot(f.phi(q)), 0.0);
    };
    EigenCandidate::Patch patch = [field, f](const CoverPoint& c) -> EigenCandidate::Rule {
        const CVec3 Ic = field->integral(c);
        return [field, f, c, Ic](const CoverPoint& q) {
            const Vec3 X = field->data().X0 + 0.5 * (Ic + field->leg(c, q)).real();
            return cplx(X.dot(f.phi(q)), 0.0);
        };
    };
    return EigenCandidate("(X, phi)", rule, true, patch);
}

EigenCandidate support_function(const WeierstrassData& d, const ClosureResult& c, double tol, const PathOptions& opt) {
    if (c.residual > tol)
        throw Error(Errc::closure_failed, "closure residual " + std::to_string(c.residual) + " exceeds " +
                                              std::to_string(tol));
    WeierstrassData dd = d;
    dd.X0 = c.X0;
    return support_function(std::make_shared<const SupportField>(std::move(dd), opt), DevelopingMap(d.f));
}

double probe_radius(const ConePoint& p, const std::vector<ConePoint>& cones) {
    if (p.at_infinity) {
        double m = 1.0;
        for (const auto& c : cones)
            if (!c.at_infinity) m = std::max(m, std::abs(c.position));
        return 100.0 * m;
    }
    double m = 1.0;
    for (const auto& c : cones)
        if (!c.at_infinity && c.position != p.position) m = std::min(m, std::abs(c.position - p.position));
    if (p.position != 0.0) m = std::min(m, std::abs(p.position));
    return 0.01 * m;
}

BoundednessResult boundedness_probe(const EigenCandidate& u, const ConePoint& p, double r0, int levels, int samples) {
    BoundednessResult out;
    std::vector<double> xs;
    for (int j = 0; j < levels; ++j) {
        const double rho = p.at_infinity ? r0 * std::ldexp(1.0, j) : r0 * std::ldexp(1.0, -j);
        double m = 0;
        for (int k = 0; k < samples; ++k) {
            const cplx z = (p.at_infinity ? 0.0 : p.position) + std::polar(rho, -pi + two_pi * (k + 0.5) / samples);
            m = std::max(m, std::abs(u(CoverPoint::on_branch(z, 0))));
        }
        out.radii.push_back(rho);
        out.maxima.push_back(m);
        xs.push_back(p.at_infinity ? -std::log(rho) : std::log(rho));
    }
    // least-squares slope of log max |u| against log(distance), over the
    // innermost levels: a bounded u creeping up to its limit shows a small
    // negative slope that dies out, a pole keeps it
    const int first = std::max(0, levels - std::max(4, levels / 3));
    const int n = levels - first;
    double mx = 0, my = 0;
    for (int j = first; j < levels; ++j) {
        mx += xs[j];
        my += std::log(std::max(out.maxima[j], 1e-300));
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (int j = first; j < levels; ++j) {
        const double dx = xs[j] - mx;
        sxy += dx * (std::log(std::max(out.maxima[j], 1e-300)) - my);
        sxx += dx * dx;
    }
    out.slope = sxx > 0 ? sxy / sxx : 0.0;
    out.bounded = out.slope >= -0.05;
    return out;
}

}  // namespace sphcone
