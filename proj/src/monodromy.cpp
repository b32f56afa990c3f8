#include "sphcone/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace sphcone {

PSU2Element PSU2Element::make(cplx a, cplx b) {
    const double n = std::norm(a) + std::norm(b);
    if (std::abs(n - 1) > 1e-12) throw Error(Errc::not_unitary, "|a|^2 + |b|^2 = " + std::to_string(n));
    for (double x : {a.real(), a.imag(), b.real(), b.imag()}) {
        if (x > 0) break;
        if (x < 0) {
            a = -a;
            b = -b;
            break;
        }
    }
    return {a, b};
}

Eigen::Matrix2cd PSU2Element::matrix() const {
    Eigen::Matrix2cd m;
    m << a, b, -std::conj(b), std::conj(a);
    return m;
}

PSU2Element PSU2Element::operator*(const PSU2Element& o) const {
    const Eigen::Matrix2cd m = matrix() * o.matrix();
    const double n = std::sqrt(std::norm(m(0, 0)) + std::norm(m(0, 1)));
    return make(m(0, 0) / n, m(0, 1) / n);
}

cplx PSU2Element::apply(cplx f) const { return (a * f + b) / (-std::conj(b) * f + std::conj(a)); }

double PSU2Element::distance(const PSU2Element& o) const {
    const double plus = std::hypot(std::abs(a - o.a), std::abs(b - o.b));
    const double minus = std::hypot(std::abs(a + o.a), std::abs(b + o.b));
    return std::min(plus, minus);
}

Mat3 psu2_to_so3(const PSU2Element& A) {
    const double n = std::norm(A.a) + std::norm(A.b);
    if (std::abs(n - 1) > 1e-12) throw Error(Errc::not_unitary, "|a|^2 + |b|^2 = " + std::to_string(n));
    const cplx a = A.a, b = A.b;
    const cplx d = a * a - b * b, s = a * a + b * b, p = a * b, q = a * std::conj(b);
    Mat3 m;
    m << d.real(), s.imag(), -2 * p.real(),
        -d.imag(), s.real(), 2 * p.imag(),
        2 * q.real(), 2 * q.imag(), std::norm(a) - std::norm(b);
    return m;
}

Mat3 so3_action(const PSU2Element& A) { return psu2_to_so3(A.conjugated()); }

// ------------------------------------------------------------ continuation

namespace {

double segment_distance(cplx a, cplx b, cplx p) {
    const cplx d = b - a;
    const double L2 = std::norm(d);
    if (L2 == 0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0);
    return std::abs(a + t * d - p);
}

}  // namespace

MonodromyElement continue_along(const TwistedRational& f, const Polyline& loop, const std::vector<cplx>& avoid,
                                std::string label) {
    if (loop.size() < 3) throw Error(Errc::invalid_input, "loop needs at least 3 vertices");
    const cplx base = loop.front();
    const double scale = std::max(1.0, std::abs(base));
    if (std::abs(loop.back() - base) > 1e-12 * scale) throw Error(Errc::invalid_input, "loop is not closed");

    std::vector<cplx> sing = avoid;
    sing.push_back(0.0);
    double clearance = std::abs(base);
    for (std::size_t i = 0; i + 1 < loop.size(); ++i)
        for (cplx s : sing) {
            const double d = segment_distance(loop[i], loop[i + 1], s);
            if (d <= 1e-10 * scale) throw Error(Errc::singular_loop, "segment passes through a singular point");
            clearance = std::min(clearance, std::abs(base - s));
        }

    // track log z, with sub-steps short compared with |z|
    CoverPoint cur = CoverPoint::on_branch(base, 0);
    const CoverPoint start = cur;
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
        const cplx a = loop[i], b = loop[i + 1];
        const double dmin = segment_distance(a, b, 0.0);
        const int n = std::max(1, static_cast<int>(std::ceil(4 * std::abs(b - a) / dmin)));
        for (int k = 1; k <= n; ++k) cur = cur.near(a + (b - a) * (double(k) / n));
    }
    const CoverPoint end = CoverPoint::from_log(cur.log);
    const double turns = (end.log - start.log).imag() / two_pi;
    const int winding = static_cast<int>(std::lround(turns));

    // germ samples around the base point
    const double rho = std::min(0.25 * clearance, 0.05 * std::abs(base));
    std::vector<cplx> N0, D0, N1, D1;
    for (int k = 0; k < 4; ++k) {
        const cplx z = base + std::polar(rho, 0.3 + k * two_pi / 4);
        const CoverPoint p0 = start.near(z), p1 = start.turned(winding).near(z);
        N0.push_back(f.num()(p0));
        D0.push_back(f.den()(p0));
        N1.push_back(f.num()(p1));
        D1.push_back(f.den()(p1));
    }
    // (a N + b D) D1 - N1 (c N + d D) = 0
    auto row = [&](int k) {
        Eigen::RowVector4cd r;
        r << N0[k] * D1[k], D0[k] * D1[k], -N1[k] * N0[k], -N1[k] * D0[k];
        return Eigen::RowVector4cd(r / r.norm());
    };
    Eigen::Matrix<cplx, 3, 4> A;
    for (int k = 0; k < 3; ++k) A.row(k) = row(k);
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 3, 4>> svd(A, Eigen::ComputeFullV);
    const Eigen::Vector4cd v = svd.matrixV().col(3);
    const double fit = std::abs(row(3).dot(v.conjugate())) / v.norm();

    Eigen::Matrix2cd M;
    M << v(0), v(1), v(2), v(3);
    const cplx det = M.determinant();
    if (std::abs(det) < 1e-14 * M.squaredNorm())
        throw Error(Errc::not_unitary, "fitted Moebius map is degenerate");
    M /= std::sqrt(det);
    Eigen::JacobiSVD<Eigen::Matrix2cd> pol(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2cd Q = pol.matrixU() * pol.matrixV().adjoint();
    Q /= std::sqrt(Q.determinant());
    const double defect = std::min((M - Q).norm(), (M + Q).norm());
    if (defect > 1e-8 || fit > 1e-8)
        throw Error(Errc::not_unitary, "distance to SU(2) " + std::to_string(defect) + ", fit residual " +
                                           std::to_string(fit));
    const double nrm = std::sqrt(std::norm(Q(0, 0)) + std::norm(Q(0, 1)));
    MonodromyElement out;
    out.psu2 = PSU2Element::make(Q(0, 0) / nrm, Q(0, 1) / nrm);
    out.so3 = so3_action(out.psu2);
    out.loop_label = std::move(label);
    out.fit_residual = fit;
    out.unitarity_defect = defect;
    out.winding = winding;
    return out;
}

std::vector<GeneratorLoop> generator_loops(const std::vector<ConePoint>& cones, cplx base, int segments) {
    std::vector<cplx> finite;
    bool inf_cone = false;
    for (const auto& c : cones) {
        if (c.at_infinity)
            inf_cone = true;
        else
            finite.push_back(c.position);
    }
    std::vector<cplx> sing = finite;
    if (std::none_of(sing.begin(), sing.end(), [](cplx z) { return z == 0.0; })) sing.push_back(0.0);

    const std::size_t count = inf_cone ? finite.size() : (finite.empty() ? 0 : finite.size() - 1);
    std::vector<GeneratorLoop> out;
    for (std::size_t i = 0; i < count; ++i) {
        const cplx p = finite[i];
        double r = 0.1;
        for (cplx s : sing)
            if (s != p) r = std::min(r, 0.5 * std::abs(s - p));
        if (std::abs(base - p) <= r) throw Error(Errc::singular_loop, "base point too close to a cone point");
        const double th0 = std::arg(base - p);
        GeneratorLoop g;
        std::ostringstream nm;
        nm << "loop(" << p.real() << (p.imag() < 0 ? "" : "+") << p.imag() << "i)";
        g.label = nm.str();
        g.center = p;
        g.path.push_back(base);
        for (int k = 0; k <= segments; ++k) g.path.push_back(p + std::polar(r, th0 + two_pi * k / segments));
        g.path.push_back(base);
        out.push_back(std::move(g));
    }
    return out;
}

std::string to_string(MonodromyClass c) {
    switch (c) {
        case MonodromyClass::trivially_reducible: return "trivially_reducible";
        case MonodromyClass::reducible: return "reducible";
        case MonodromyClass::irreducible: return "irreducible";
    }
    return "?";
}

Classification classify(const ConicalMetric& m, cplx base) {
    std::vector<cplx> avoid;
    for (const auto& c : m.cones)
        if (!c.at_infinity) avoid.push_back(c.position);
    Classification out;
    for (const auto& g : generator_loops(m.cones, base))
        out.generators.push_back(continue_along(m.f, g.path, avoid, g.label));

    bool trivial = true;
    for (const auto& e : out.generators)
        if ((e.so3 - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-8) trivial = false;
    if (trivial) {
        out.kind = MonodromyClass::trivially_reducible;
        return out;
    }
    Eigen::MatrixXd B(3 * out.generators.size(), 3);
    for (std::size_t i = 0; i < out.generators.size(); ++i)
        B.block(3 * i, 0, 3, 3) = out.generators[i].so3 - Mat3::Identity();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
    out.axis_residual = svd.singularValues()(2);
    if (out.axis_residual <= 1e-8) {
        Vec3 s = svd.matrixV().col(2);
        Eigen::Index k;
        s.cwiseAbs().maxCoeff(&k);
        if (s(k) < 0) s = -s;
        out.kind = MonodromyClass::reducible;
        out.axis = s;
    } else {
        out.kind = MonodromyClass::irreducible;
    }
    return out;
}

}  // namespace sphcone
