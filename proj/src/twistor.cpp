#include "sphcone/twistor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sphcone/weierstrass.hpp"

namespace sphcone {

namespace {

const double rt2 = std::sqrt(2.0);

TwistedRational zero_tr(double al) { return TwistedRational(ExpPoly(al)); }

int partner(int i) { return i == 0 ? 0 : (i % 2 == 1 ? i + 1 : i - 1); }

// products of ExpPoly vectors in labeled coordinates
ExpPoly bilinear_poly(const std::vector<ExpPoly>& x, const std::vector<ExpPoly>& y) {
    ExpPoly s(x.front().alpha());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!x[i].is_zero() && !y[partner(static_cast<int>(i))].is_zero()) s += x[i] * y[partner(static_cast<int>(i))];
    return s;
}

std::vector<ExpPoly> directrix_polys(const DirectrixSkeleton& s, std::span<const cplx> a) {
    const int m = s.m;
    const double al = s.alpha;
    std::vector<ExpPoly> c(2 * m + 1, ExpPoly(al));
    for (int j = 1; j <= m - 1; ++j) {
        c[BilinearSpace::Ebar(j)] = ExpPoly::monomial(al, {j - 1, 0}, a[j - 1]);
        c[BilinearSpace::E(j)] = ExpPoly::monomial(al, {2 * s.k - j + 1, 0});
    }
    c[BilinearSpace::Ebar(m)] = ExpPoly::monomial(al, {m - 2, 1}, a[m - 1]);
    c[BilinearSpace::E(m)] = ExpPoly::monomial(al, {2 * s.k - m + 2, -1});
    c[0] = ExpPoly::monomial(al, {s.k, 0});
    return c;
}

std::vector<std::vector<ExpPoly>> derivatives(std::vector<ExpPoly> x, int count) {
    std::vector<std::vector<ExpPoly>> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(x);
        for (auto& c : x) c = c.derivative();
    }
    return out;
}

VFunction to_vfunction(const std::vector<ExpPoly>& x) {
    VFunction v;
    for (const auto& c : x) v.comps.emplace_back(c);
    return v;
}

// orthonormal basis (Hermitian) of the column span
Eigen::MatrixXcd orthonormal(Eigen::MatrixXcd A) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const double n = A.col(j).norm();
        if (n > 0) A.col(j) /= n;
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(A.rows(), A.cols());
}

// smallest sine of the principal angles between span A and span B
double min_sine(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    const Eigen::MatrixXcd QA = orthonormal(A), QB = orthonormal(B);
    const Eigen::MatrixXcd R = QB - QA * (QA.adjoint() * QB);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R);
    return svd.singularValues().minCoeff();
}

CVec unit(int n, int i) {
    CVec v = CVec::Zero(n);
    v[i] = 1.0;
    return v;
}

void complete_v(LPrime& L, const CVec& v3) {
    const int n = 2 * L.m + 1;
    L.V = {unit(n, 2 * L.m - 1), -unit(n, 2 * L.m), v3};
}

}  // namespace

// ---------------------------------------------------------------- spaces

BilinearSpace::BilinearSpace(int m) : m_(m) {
    if (m < 1) throw Error(Errc::invalid_input, "m must be positive");
}

std::string BilinearSpace::label(int i) const {
    if (i == 0) return "e0";
    const int j = (i + 1) / 2;
    return (i % 2 == 1 ? "E" : "Ebar") + std::to_string(j);
}

cplx BilinearSpace::gram(int i, int j) const { return partner(i) == j ? 1.0 : 0.0; }

cplx BilinearSpace::product(const CVec& x, const CVec& y) const {
    cplx s = x[0] * y[0];
    for (int j = 1; j <= m_; ++j) s += x[E(j)] * y[Ebar(j)] + x[Ebar(j)] * y[E(j)];
    return s;
}

CVec BilinearSpace::labeled_from_real(const CVec& r) const {
    CVec l(dim());
    l[0] = r[0];
    for (int j = 1; j <= m_; ++j) {
        l[E(j)] = (r[2 * j - 1] - I * r[2 * j]) / rt2;
        l[Ebar(j)] = (r[2 * j - 1] + I * r[2 * j]) / rt2;
    }
    return l;
}

CVec BilinearSpace::real_from_labeled(const CVec& l) const {
    CVec r(dim());
    r[0] = l[0];
    for (int j = 1; j <= m_; ++j) {
        r[2 * j - 1] = (l[E(j)] + l[Ebar(j)]) / rt2;
        r[2 * j] = I * (l[E(j)] - l[Ebar(j)]) / rt2;
    }
    return r;
}

VFunction VFunction::derivative() const {
    VFunction d;
    for (const auto& c : comps) d.comps.push_back(c.derivative());
    return d;
}

CVec VFunction::operator()(const CoverPoint& p) const {
    CVec v(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) v[i] = comps[i].is_zero() ? cplx(0.0) : comps[i](p);
    return v;
}

TwistedRational bilinear(const BilinearSpace& S, const VFunction& x, const VFunction& y) {
    TwistedRational s = zero_tr(x.alpha());
    for (int i = 0; i < S.dim(); ++i)
        if (!x.comps[i].is_zero() && !y.comps[partner(i)].is_zero()) s += x.comps[i] * y.comps[partner(i)];
    return s;
}

TwistedRational bilinear(const BilinearSpace& S, const VFunction& x, const CVec& c) {
    TwistedRational s = zero_tr(x.alpha());
    for (int i = 0; i < S.dim(); ++i) {
        const cplx ci = c[partner(i)];
        if (ci != 0.0 && !x.comps[i].is_zero()) s += x.comps[i] * ci;
    }
    return s;
}

// -------------------------------------------------------------- directrix

VFunction DirectrixSkeleton::with(std::span<const cplx> a) const {
    if (static_cast<int>(a.size()) != m) throw Error(Errc::invalid_input, "need m coefficients");
    return to_vfunction(directrix_polys(*this, a));
}

DirectrixSkeleton directrix_family(int m, int k, double alpha) {
    if (m < 2) throw Error(Errc::invalid_input, "m must be at least 2");
    if (k < m - 1) throw Error(Errc::invalid_input, "k must be at least m - 1");
    if (!(alpha > 0 && alpha < k - (m - 2))) throw Error(Errc::invalid_input, "need 0 < alpha < k - (m - 2)");
    if (std::abs(alpha - std::round(alpha)) < 1e-12) throw Error(Errc::invalid_input, "alpha must not be an integer");
    return {m, k, alpha};
}

std::vector<VFunction> DirectrixCurve::lift() const {
    std::vector<VFunction> out;
    for (const auto& x : derivatives(directrix_polys(skeleton, a), skeleton.m)) out.push_back(to_vfunction(x));
    return out;
}

DirectrixCurve solve_coefficients(const DirectrixSkeleton& s) {
    const int m = s.m;
    auto products = [&](std::span<const cplx> a) {
        const auto d = derivatives(directrix_polys(s, a), m);
        std::vector<ExpPoly> out;
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) out.push_back(bilinear_poly(d[i], d[j]));
        return out;
    };
    // the products are affine in a: P(a) = P0 + sum a_l P_l
    const std::vector<cplx> zero(m, 0.0);
    const auto P0 = products(zero);
    std::vector<std::vector<ExpPoly>> Pl;
    for (int l = 0; l < m; ++l) {
        std::vector<cplx> e(m, 0.0);
        e[l] = 1.0;
        auto P = products(e);
        for (std::size_t q = 0; q < P.size(); ++q) P[q] -= P0[q];
        Pl.push_back(std::move(P));
    }
    std::vector<std::vector<cplx>> rows;
    std::vector<cplx> rhs;
    for (std::size_t q = 0; q < P0.size(); ++q) {
        std::map<Exponent, int> seen;
        for (const auto& [e, c] : P0[q].terms()) seen[e];
        for (int l = 0; l < m; ++l)
            for (const auto& [e, c] : Pl[l][q].terms()) seen[e];
        for (const auto& [e, unused] : seen) {
            std::vector<cplx> r(m);
            for (int l = 0; l < m; ++l) r[l] = Pl[l][q].coefficient(e);
            rows.push_back(r);
            rhs.push_back(-P0[q].coefficient(e));
        }
    }
    Eigen::MatrixXcd A(rows.size(), m);
    Eigen::VectorXcd b(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int l = 0; l < m; ++l) A(r, l) = rows[r][l];
        b[r] = rhs[r];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < m) throw Error(Errc::degenerate_family, "family degenerate for these (m, k, alpha)");
    const Eigen::VectorXcd x = qr.solve(b);
    DirectrixCurve c{s, std::vector<cplx>(x.data(), x.data() + m)};
    return c;
}

IsotropyCheck isotropy_verify(const DirectrixCurve& c, double tol) {
    const auto d = derivatives(directrix_polys(c.skeleton, c.a), c.skeleton.m);
    IsotropyCheck out;
    for (int i = 0; i < c.skeleton.m; ++i)
        for (int j = i; j < c.skeleton.m; ++j)
            out.worst = std::max(out.worst, bilinear_poly(d[i], d[j]).max_abs_coefficient());
    out.ok = out.worst <= tol;
    return out;
}

// ----------------------------------------------------------------- planes

LPrime default_lprime(int m) {
    const int n = 2 * m + 1;
    LPrime L;
    L.m = m;
    L.label = "default";
    L.E.push_back((unit(n, 0) - I * unit(n, 2)) / rt2);
    for (int j = 2; j <= m - 1; ++j) L.E.push_back((unit(n, 2 * j - 3) - I * unit(n, 2 * j)) / rt2);
    complete_v(L, unit(n, 2 * m - 3));
    return L;
}

LPrime random_lprime(int m, std::mt19937_64& rng) {
    const int n = 2 * m + 1, w = 2 * m - 1;
    std::normal_distribution<double> g;
    Eigen::MatrixXd G(w, w);
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) G(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    const Eigen::MatrixXd Q = qr.householderQ();
    LPrime L;
    L.m = m;
    L.label = "random";
    auto embed = [&](int col) {
        CVec v = CVec::Zero(n);
        for (int i = 0; i < w; ++i) v[i] = Q(i, col);
        return v;
    };
    for (int j = 1; j <= m - 1; ++j) L.E.push_back((embed(2 * j - 2) - I * embed(2 * j - 1)) / rt2);
    complete_v(L, embed(w - 1));
    return L;
}

LPrime lprime_from_vectors(int m, std::vector<CVec> E, std::string label) {
    const int n = 2 * m + 1;
    if (static_cast<int>(E.size()) != m - 1) throw Error(Errc::invalid_input, "L' needs m - 1 vectors");
    for (std::size_t i = 0; i < E.size(); ++i) {
        if (E[i].size() != n) throw Error(Errc::invalid_input, "wrong vector length");
        if (std::abs(E[i][2 * m - 1]) > 1e-12 || std::abs(E[i][2 * m]) > 1e-12)
            throw Error(Errc::invalid_input, "L' must be orthogonal to E_m and conj E_m");
        for (std::size_t j = 0; j < E.size(); ++j) {
            if (std::abs(E[i].dot(E[j].conjugate())) > 1e-12) throw Error(Errc::invalid_input, "L' is not isotropic");
            const cplx h = E[i].transpose() * E[j].conjugate();
            if (std::abs(h - (i == j ? 1.0 : 0.0)) > 1e-12)
                throw Error(Errc::invalid_input, "need (E'_i, conj E'_j) = delta_ij");
        }
    }
    // v3 spans the real directions of span{e0..e_{2m-2}} orthogonal to Re, Im of L'
    Eigen::MatrixXd M(2 * (m - 1), 2 * m - 1);
    for (int i = 0; i < m - 1; ++i)
        for (int c = 0; c < 2 * m - 1; ++c) {
            M(2 * i, c) = E[i][c].real();
            M(2 * i + 1, c) = E[i][c].imag();
        }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    CVec v3 = CVec::Zero(n);
    for (int c = 0; c < 2 * m - 1; ++c) v3[c] = svd.matrixV()(c, 2 * m - 2);
    LPrime L{m, std::move(label), std::move(E), {}};
    complete_v(L, v3);
    return L;
}

double separation_from_l0(const LPrime& L) {
    const int m = L.m, n = 2 * m + 1;
    if (m < 2) return 1.0;
    Eigen::MatrixXcd A(n, m - 1), B(n, m - 1);
    for (int j = 0; j < m - 1; ++j) {
        A.col(j) = L.E[j];
        B.col(j) = (unit(n, 2 * j + 1) + I * unit(n, 2 * j + 2)) / rt2;
    }
    return std::min(min_sine(B, A), min_sine(B.conjugate(), A));
}

double min_intersection_sine(const BilinearSpace& S, std::span<const VFunction> psi, const LPrime& L) {
    const int n = S.dim();
    Eigen::MatrixXcd B(n, L.E.size());
    for (std::size_t j = 0; j < L.E.size(); ++j) B.col(j) = L.E[j];
    double worst = 1.0;
    for (double r : {1e-4, 1e-2, 0.3, 1.0, 3.0, 1e2, 1e4}) {
        for (int t = 0; t < 12; ++t) {
            const auto p = CoverPoint::on_branch(std::polar(r, -pi + two_pi * (t + 0.5) / 12), 0);
            Eigen::MatrixXcd A(n, psi.size());
            for (std::size_t i = 0; i < psi.size(); ++i) A.col(i) = S.real_from_labeled(psi[i](p));
            worst = std::min(worst, min_sine(A, B));
        }
    }
    return worst;
}

// ---------------------------------------------------------- special basis

SpecialBasis special_basis(const BilinearSpace& S, std::span<const VFunction> psi, const LPrime& L, double sine_tol) {
    const int m = S.m();
    if (static_cast<int>(psi.size()) != m || L.m != m) throw Error(Errc::invalid_input, "need m vectors and an m-plane");
    const double al = psi.front().alpha();
    SpecialBasis out;
    out.min_sine = m > 1 ? min_intersection_sine(S, psi, L) : 1.0;
    if (out.min_sine < sine_tol)
        throw Error(Errc::pivot_zero, "min sine " + std::to_string(out.min_sine) + " at sampled points");

    std::vector<CVec> Ep, Epbar, Vl;  // labeled coordinates
    for (const auto& e : L.E) {
        Ep.push_back(S.labeled_from_real(e));
        Epbar.push_back(S.labeled_from_real(e.conjugate()));
    }
    for (const auto& v : L.V) Vl.push_back(S.labeled_from_real(v));

    // rows: Ebar'-coordinates (psi_i, E'_k) and the combination of psi used
    struct Row {
        std::vector<TwistedRational> c, comb;
    };
    std::vector<Row> rows;
    for (int i = 0; i < m; ++i) {
        Row r;
        for (int k = 0; k < m - 1; ++k) r.c.push_back(bilinear(S, psi[i], Ep[k]));
        for (int l = 0; l < m; ++l) r.comb.push_back(TwistedRational::constant(al, l == i ? 1.0 : 0.0));
        rows.push_back(std::move(r));
    }
    const auto test = CoverPoint::on_branch(std::polar(0.83, 0.61), 0);
    auto tidy = [](TwistedRational& t) {
        t = t.pruned(1e-14);
        if (auto c = cancel_common_roots(t)) t = *c;
        // keep coefficients near 1; products of many fractions overflow otherwise
        const double s = t.den().max_abs_coefficient();
        if (s > 0 && (s > 1e8 || s < 1e-8)) {
            const ExpPoly c = ExpPoly::constant(t.alpha(), 1.0 / s);
            t = TwistedRational(t.num() * c, t.den() * c);
        }
    };
    std::vector<int> pivot_row(m - 1, -1);
    std::vector<bool> used(m, false);
    for (int k = 0; k < m - 1; ++k) {
        int best = -1;
        double big = 0, scale = 0;
        for (int r = 0; r < m; ++r) {
            if (rows[r].c[k].is_zero()) continue;
            const double v = std::abs(rows[r].c[k](test));
            scale = std::max(scale, rows[r].c[k].num().magnitude_at(test) / std::abs(rows[r].c[k].den()(test)));
            if (!used[r] && v > big) {
                big = v;
                best = r;
            }
        }
        if (best < 0 || big <= 1e-12 * scale) throw Error(Errc::pivot_zero, "pivot vanishes identically");
        used[best] = true;
        pivot_row[k] = best;
        const TwistedRational inv = rows[best].c[k].reciprocal();
        for (auto& t : rows[best].c) {
            t = t * inv;
            tidy(t);
        }
        for (auto& t : rows[best].comb) {
            t = t * inv;
            tidy(t);
        }
        rows[best].c[k] = TwistedRational::constant(al, 1.0);
        for (int r = 0; r < m; ++r) {
            if (r == best || rows[r].c[k].is_zero()) continue;
            const TwistedRational fac = rows[r].c[k];
            for (int q = 0; q < m - 1; ++q) {
                rows[r].c[q] -= fac * rows[best].c[q];
                tidy(rows[r].c[q]);
            }
            for (int l = 0; l < m; ++l) {
                rows[r].comb[l] -= fac * rows[best].comb[l];
                tidy(rows[r].comb[l]);
            }
            rows[r].c[k] = zero_tr(al);
        }
    }
    std::vector<int> order(pivot_row);
    for (int r = 0; r < m; ++r)
        if (!used[r]) order.push_back(r);

    for (int j = 0; j < m; ++j) {
        const Row& r = rows[order[j]];
        VFunction F;
        for (int c = 0; c < S.dim(); ++c) {
            TwistedRational t = zero_tr(al);
            for (int l = 0; l < m; ++l)
                if (!r.comb[l].is_zero() && !psi[l].comps[c].is_zero()) t += r.comb[l] * psi[l].comps[c];
            tidy(t);
            F.comps.push_back(t);
        }
        std::array<TwistedRational, 3> V{zero_tr(al), zero_tr(al), zero_tr(al)};
        for (int a = 0; a < 3; ++a) {
            V[a] = bilinear(S, F, Vl[a]);
            tidy(V[a]);
        }
        std::vector<TwistedRational> u;
        for (int k = 0; k < m - 1; ++k) {
            u.push_back(bilinear(S, F, Epbar[k]));
            tidy(u.back());
        }
        out.u.push_back(std::move(u));
        if (j < m - 1)
            out.G.push_back(V);
        else
            out.w = V;
        out.F.push_back(std::move(F));
    }
    return out;
}

// --------------------------------------------------------- limiting data

LimitingMap limiting_map(const SpecialBasis& b) {
    const TwistedRational q = b.w[0] - I * b.w[1];
    if (q.is_zero() || b.w[2].is_zero()) throw Error(Errc::degenerate_projection, "w3 / (w1 - i w2) is degenerate");
    TwistedRational f = b.w[2] / q;
    f = f.pruned(1e-14);
    if (auto c = cancel_common_roots(f)) f = *c;

    const LimitingMap raw{f, 1.0, b.G};
    cplx c = 0.0;
    try {
        c = f(CoverPoint::on_branch(1.0, 0));
    } catch (const Error&) {
    }
    if (std::abs(c) < 1e-12 || !std::isfinite(std::abs(c))) return raw;
    return rescaled(raw, 1.0 / c);
}

LimitingMap rescaled(const LimitingMap& lm, cplx s) {
    if (s == 0.0) throw Error(Errc::invalid_input, "zero rescaling");
    // scaling E_m by s and conj E_m by 1/s is complex orthogonal, fixes L'
    // and multiplies f by s
    LimitingMap out{lm.f * s, lm.scale / s, lm.G};
    // on (G1, G2): a complex rotation by the angle -i log s
    const cplx ch = 0.5 * (s + 1.0 / s), sh = 0.5 * (s - 1.0 / s);
    for (auto& G : out.G) {
        const TwistedRational g1 = G[0], g2 = G[1];
        G[0] = g1 * ch;
        G[1] = g2 * ch;
        if (std::abs(sh) > 0) {
            G[0] += g2 * (I * sh);
            G[1] -= g1 * (I * sh);
        }
    }
    return out;
}

EigenCandidate twistor_eigenfunction(const TwistedRational& f, const std::array<TwistedRational, 3>& G,
                                     std::string name) {
    const DevelopingMap F(f);
    return EigenCandidate(std::move(name), [F, G](const CoverPoint& p) {
        const Vec3 phi = F.phi(p);
        cplx s = 0.0;
        for (int a = 0; a < 3; ++a)
            if (!G[a].is_zero()) s += G[a](p) * phi[a];
        return s;
    });
}

std::vector<EigenCandidate> extra_eigenfunctions(const LimitingMap& lm) {
    std::vector<EigenCandidate> out;
    for (std::size_t j = 0; j < lm.G.size(); ++j)
        out.push_back(twistor_eigenfunction(lm.f, lm.G[j], "h" + std::to_string(j + 1)));
    return out;
}

std::vector<EigenVerdict> verify_eigenfunctions(const std::vector<EigenCandidate>& h, const TwistedRational& f,
                                                const std::vector<ConePoint>& cones, const ConstructionOptions& opt) {
    const DevelopingMap F(f);
    const Grid g = exclude_points(parse_grid(opt.grid), cones, opt.exclusion, 0.0);
    std::vector<EigenVerdict> out;
    for (const auto& hj : h) {
        for (int part = 0; part < 2; ++part) {
            const EigenCandidate u = part == 0 ? hj.real_part() : hj.imag_part();
            EigenVerdict v;
            v.name = (part == 0 ? "Re " : "Im ") + hj.name();
            // the difference stencil trades truncation against evaluation
            // noise divided by h^2 |phi_z|^2; keep the step that resolves best
            for (double h : opt.steps) {
                auto r = verify_grid(u, F, g.points, ResidualOptions{h}, opt.residual_tol);
                if (h == opt.steps.front() || r.max_residual < v.report.max_residual) v.report = r;
            }
            // scale-free: compare against the sup of |u| on the grid
            v.report.tolerance = opt.residual_tol * std::max(v.report.sup_u, 1e-300);
            v.report.pass = v.report.max_residual <= v.report.tolerance;
            v.single_valued = single_valuedness(u, g.points);
            v.gram = gram_remainder(u, F, g.points);
            v.bounded = true;
            for (const auto& c : cones) {
                const auto b = boundedness_probe(u, c, probe_radius(c, cones));
                v.probe_slopes.push_back(b.slope);
                v.bounded = v.bounded && b.bounded;
            }
            v.pass = v.report.pass && v.single_valued <= 1e-8 * (1 + v.report.sup_u) && v.gram >= opt.gram_min &&
                     v.bounded;
            out.push_back(std::move(v));
        }
    }
    return out;
}

ConstructionResult run_algorithm(int m, int k, double alpha, const ConstructionOptions& opt) {
    ConstructionResult res;
    if (m > 3) res.log.push_back("m > 3 is experimental");
    res.curve = solve_coefficients(directrix_family(m, k, alpha));
    res.isotropy = isotropy_verify(res.curve);
    if (!res.isotropy.ok) throw Error(Errc::degenerate_family, "isotropy fails after solving");
    const BilinearSpace S(m);
    const auto psi = res.curve.lift();
    std::mt19937_64 rng(opt.seed);
    for (int attempt = 0; attempt <= opt.retries; ++attempt) {
        res.attempts = attempt + 1;
        LPrime L = attempt == 0 ? default_lprime(m) : random_lprime(m, rng);
        std::ostringstream why;
        why << "plane " << attempt << " (" << L.label << "): ";
        try {
            const double sep = separation_from_l0(L);
            if (sep < 1e-6) {
                why << "meets L'_0 or its conjugate (sine " << sep << ")";
                res.log.push_back(why.str());
                continue;
            }
            auto basis = special_basis(S, psi, L, opt.sine_tol);
            auto lm = limiting_map(basis);
            auto cones = cone_points(lm.f);
            auto h = extra_eigenfunctions(lm);
            auto verdicts = verify_eigenfunctions(h, lm.f, cones, opt);
            const bool ok = std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
            if (!ok) {
                why << "eigenfunction check failed";
                res.log.push_back(why.str());
                continue;
            }
            res.lprime = std::move(L);
            res.basis = std::move(basis);
            res.map = std::move(lm);
            res.cones = std::move(cones);
            res.eigenfunctions = std::move(h);
            res.verdicts = std::move(verdicts);
            return res;
        } catch (const Error& e) {
            why << e.what();
            res.log.push_back(why.str());
        }
    }
    std::string all;
    for (const auto& l : res.log) all += "\n  " + l;
    throw Error(Errc::no_admissible_plane, "retry budget exhausted:" + all);
}

}  // namespace sphcone
