#include "sphcone/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sphcone/families.hpp"
#include "sphcone/monodromy.hpp"

namespace sphcone {

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat_json(const Mat3& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    return rows;
}

json cone_json(const ConePoint& p) {
    json j{{"angle", p.angle}, {"angle_rad", two_pi * p.angle}, {"integer", p.is_integer}, {"at_infinity", p.at_infinity}};
    if (!p.at_infinity) j["position"] = complex_to_json(p.position);
    return j;
}

json verify_json(const VerifyReport& r) {
    return {{"points", r.points},
            {"h", r.h},
            {"max_residual", r.max_residual},
            {"argmax", complex_to_json(r.worst_point)},
            {"sup_u", r.sup_u}};
}

std::vector<Mat3> so3s(const Classification& c) {
    std::vector<Mat3> out;
    for (const auto& g : c.generators) out.push_back(g.so3);
    return out;
}

Grid grid_for(const GridOptions& g, const std::vector<ConePoint>& cones) {
    return exclude_points(parse_grid(g.grid), cones, g.exclusion, 0.0);
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}

TwistedRational scan_family(const std::string& name, double b) {
    if (name == "ex1") return ex1_family(b);
    throw Error(Errc::invalid_input, "unknown family '" + name + "'");
}

// checks shared by every real eigenfunction verified on a grid
void eigen_checks(Report& r, const std::string& name, const EigenCandidate& u, const DevelopingMap& F,
                  const Grid& g, double h, double tol, double gram_min, json& out) {
    const auto rep = verify_grid(u, F, g.points, ResidualOptions{h});
    r.at_most(name + ": eigen residual", rep.max_residual, tol);
    const double sv = single_valuedness(u, g.points);
    r.at_most(name + ": branch difference", sv, 1e-8 * (1 + rep.sup_u));
    const double gram = gram_remainder(u, F, g.points);
    r.at_least(name + ": remainder off span (phi, e_i)", gram, gram_min);
    out[name] = verify_json(rep);
    out[name]["gram_remainder"] = gram;
}

}  // namespace

// ------------------------------------------------------------ subcommands

Report cones_report(const TwistedRational& f) {
    Report r("cones");
    r.input("map", to_json(f).dump());
    const auto cones = cone_points(f);
    json list = json::array();
    double chi = 2;
    for (const auto& p : cones) {
        list.push_back(cone_json(p));
        chi += p.angle - 1;
    }
    r.result("cones", list);
    // Gauss-Bonnet: area = 2 pi (2 + sum (beta - 1)) of a curvature-1 metric
    r.result("area_over_2pi", chi);
    r.at_least("Gauss-Bonnet area / 2 pi", chi, 1e-12);
    return r;
}

Report monodromy_report(const TwistedRational& f) {
    Report r("monodromy");
    r.input("map", to_json(f).dump());
    const auto m = make_metric(f);
    const auto c = classify(m);
    json gens = json::array();
    double fit = 0, unit = 0;
    for (const auto& g : c.generators) {
        gens.push_back({{"loop", g.loop_label},
                        {"a", complex_to_json(g.psu2.a)},
                        {"b", complex_to_json(g.psu2.b)},
                        {"so3", mat_json(g.so3)},
                        {"winding", g.winding},
                        {"fit_residual", g.fit_residual},
                        {"unitarity_defect", g.unitarity_defect}});
        fit = std::max(fit, g.fit_residual);
        unit = std::max(unit, g.unitarity_defect);
    }
    r.result("generators", gens);
    r.result("class", to_string(c.kind));
    if (c.axis) r.result("axis", vec_json(*c.axis));
    r.result("axis_residual", c.axis_residual);
    r.at_most("Moebius fit residual", fit, 1e-8);
    r.at_most("distance to SU(2)", unit, 1e-8);
    return r;
}

Report residues_report(const TwistedRational& f, int basis_index, double tol) {
    Report r("residues");
    r.input("map", to_json(f).dump());
    r.param("basis_index", basis_index);
    r.param("tolerance", tol);
    const auto cones = cone_points(f);
    const auto basis = qd_basis(cones);
    r.result("basis_dimension", basis.size());
    if (basis.empty()) {
        r.note("no quadratic differential with simple poles at the cone points");
        r.holds("basis non-empty", false);
        return r;
    }
    if (basis_index < 0 || basis_index >= static_cast<int>(basis.size()))
        throw Error(Errc::invalid_input, "basis index out of range");
    json list = json::array();
    double worst = 0;
    for (const auto& c : integer_residues(basis[basis_index], f, cones)) {
        list.push_back({{"point", complex_to_json(c.point)}, {"angle", c.angle}, {"residue", complex_to_json(c.residue)}});
        worst = std::max(worst, std::abs(c.residue));
    }
    r.result("residues", list);
    r.at_most("largest |Res sigma/df| at integer cones", worst, tol);
    return r;
}

Report scan_report(const ScanRequest& req, std::string* csv) {
    Report r("scan");
    r.param("family", req.family);
    r.param("interval", json::array({req.lo, req.hi}));
    r.param("samples", req.opt.samples);
    r.param("zero_tol", req.opt.zero_tol);
    r.param("excluded", req.opt.excluded);
    scan_family(req.family, 0.5 * (req.lo + req.hi));  // validates the name
    const auto scan = find_admissible([&](double b) { return scan_family(req.family, b); }, req.lo, req.hi, req.opt);
    r.result("roots", scan.roots);
    for (const auto& n : scan.notes) r.note(n);
    std::size_t valid = 0;
    if (csv) *csv = "b,abs_residue\n";
    for (const auto& s : scan.samples) {
        if (!s.valid) continue;
        ++valid;
        if (csv) *csv += fmt(s.b) + "," + fmt(s.abs_residue) + "\n";
    }
    r.result("valid_samples", valid);
    r.at_least("valid samples", static_cast<double>(valid), 1.0);
    if (req.expect) {
        r.param("expect", *req.expect);
        r.at_most("root count mismatch", std::abs(static_cast<double>(scan.roots.size()) - req.expect->size()), 0.0);
        for (double e : *req.expect) {
            double best = INFINITY;
            for (double b : scan.roots) best = std::min(best, std::abs(b - e));
            r.at_most("|b - " + fmt(e) + "|", best, req.root_tol);
        }
    }
    return r;
}

Report weierstrass_report(const TwistedRational& f, const WeierstrassRequest& req) {
    Report r("weierstrass");
    r.input("map", to_json(f).dump());
    r.param("basis_index", req.basis_index);
    r.param("z0", complex_to_json(req.z0));
    r.param("closure_tol", req.closure_tol);
    r.param("residual_tol", req.residual_tol);
    r.param("grid", req.grid.grid);
    r.param("exclusion", req.grid.exclusion);
    r.param("h", req.grid.h);

    const auto m = make_metric(f);
    const auto cls = classify(m, req.z0);
    const auto basis = qd_basis(m.cones);
    if (basis.empty()) {
        r.note("no quadratic differential with simple poles at the cone points");
        r.holds("basis non-empty", false);
        return r;
    }
    if (req.basis_index < 0 || req.basis_index >= static_cast<int>(basis.size()))
        throw Error(Errc::invalid_input, "basis index out of range");
    const auto d = make_weierstrass(f, basis[req.basis_index], req.z0);
    const auto bad = misplaced_poles(d, m.cones);
    json badj = json::array();
    for (cplx z : bad) badj.push_back(complex_to_json(z));
    r.result("misplaced_poles", badj);
    r.at_most("poles of the integrand off the cone points", static_cast<double>(bad.size()), 0.0);

    const auto loops = generator_loops(m.cones, d.z0);
    const auto c = closure_solve(d, loops, so3s(cls));
    r.result("X0", vec_json(c.X0));
    json per = json::array();
    for (std::size_t i = 0; i < loops.size(); ++i)
        per.push_back({{"loop", loops[i].label},
                       {"period", vec_json(c.periods[i])},
                       {"residual", c.loop_residuals[i]}});
    r.result("loops", per);
    r.at_most("closure residual", c.residual, req.closure_tol);
    r.holds("periods consistent with the monodromy axis", c.axis_consistent);
    if (c.residual > req.closure_tol) {
        r.note("closure failed; support function not assembled");
        return r;
    }

    WeierstrassData dd = d;
    dd.X0 = c.X0;
    auto field = std::make_shared<const SupportField>(dd);
    const DevelopingMap F(f);
    const auto u = support_function(field, F);
    const Grid g = grid_for(req.grid, m.cones);
    json eig;
    eigen_checks(r, "u", u, F, g, req.grid.h, req.residual_tol, req.gram_min, eig);
    r.result("eigen", eig);

    json probes = json::array();
    for (const auto& p : m.cones) {
        const double r0 = probe_radius(p, m.cones);
        const auto b = boundedness_probe(u, p, r0);
        probes.push_back({{"cone", cone_json(p)}, {"r0", r0}, {"slope", b.slope}, {"bounded", b.bounded}});
        r.at_least("log-log slope of max |u| at " + (p.at_infinity ? std::string("infinity")
                                                                   : "(" + fmt(p.position.real()) + ", " +
                                                                         fmt(p.position.imag()) + ")"),
                   b.slope, -0.05);
    }
    r.result("boundedness", probes);
    return r;
}

// ----------------------------------------------------------------- verify

std::vector<EigenCandidate> eigen_from_json(const json& j, const TwistedRational& f) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        std::vector<EigenCandidate> whole;
        if (kind == "support") {
            const auto s = j.at("s");
            whole.push_back(support_candidate(DevelopingMap(f), Vec3(s.at(0), s.at(1), s.at(2))));
        } else if (kind == "intro") {
            whole.push_back(intro_candidate(j.at("beta").get<double>(), j.at("k").get<int>()));
        } else if (kind == "twistor") {
            const auto& G = j.at("G");
            if (G.size() != 3) throw Error(Errc::invalid_input, "twistor eigenfunction needs three components");
            whole.push_back(twistor_eigenfunction(f, {map_from_json(G[0]), map_from_json(G[1]), map_from_json(G[2])},
                                                  j.value("name", std::string("h"))));
        } else {
            throw Error(Errc::invalid_input, "unknown eigenfunction kind '" + kind + "'");
        }
        const std::string part = j.value("part", std::string("both"));
        std::vector<EigenCandidate> out;
        for (const auto& h : whole) {
            if (part == "re" || part == "both") out.push_back(h.real_part());
            if (part == "im" || part == "both") out.push_back(h.imag_part());
            if (part != "re" && part != "im" && part != "both")
                throw Error(Errc::invalid_input, "part must be re, im or both");
        }
        return out;
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_input, std::string("eigenfunction JSON: ") + e.what());
    }
}

Report verify_report(const TwistedRational& f, const json& eigen, const GridOptions& g, double tol) {
    Report r("verify");
    r.input("map", to_json(f).dump());
    r.input("eigenfunction", eigen.dump());
    r.param("grid", g.grid);
    r.param("exclusion", g.exclusion);
    r.param("h", g.h);
    r.param("tolerance", tol);
    const auto cands = eigen_from_json(eigen, f);
    const DevelopingMap F(f);
    const Grid grid = grid_for(g, cone_points(f));
    json out;
    for (const auto& u : cands) {
        const auto rep = verify_grid(u, F, grid.points, ResidualOptions{g.h});
        out[u.name()] = verify_json(rep);
        r.at_most(u.name() + ": eigen residual", rep.max_residual, tol);
    }
    r.result("eigen", out);
    return r;
}

// -------------------------------------------------------------- construct

Report construct_report(int m, int k, double alpha, const ConstructionOptions& opt) {
    Report r("construct");
    r.param("m", m);
    r.param("k", k);
    r.param("alpha", alpha);
    r.param("seed", opt.seed);
    r.param("grid", opt.grid);
    r.param("exclusion", opt.exclusion);
    r.param("residual_tol", opt.residual_tol);
    r.param("steps", opt.steps);
    r.param("gram_min", opt.gram_min);
    r.param("sine_tol", opt.sine_tol);
    r.param("retries", opt.retries);
    ConstructionResult res;
    try {
        res = run_algorithm(m, k, alpha, opt);
    } catch (const Error& e) {
        if (e.code() != Errc::no_admissible_plane && e.code() != Errc::degenerate_family) throw;
        r.note(e.what());
        r.holds("admissible plane found", false);
        return r;
    }
    for (const auto& l : res.log) r.note(l);
    r.result("coefficients", [&] {
        json a = json::array();
        for (cplx c : res.curve.a) a.push_back(complex_to_json(c));
        return a;
    }());
    r.at_most("isotropy of the directrix (largest coefficient)", res.isotropy.worst, 1e-12);
    r.result("plane", res.lprime.label);
    r.result("attempts", res.attempts);
    r.result("min_sine", res.basis.min_sine);
    r.result("map", to_json(res.map.f));
    r.result("map_scale", complex_to_json(res.map.scale));
    json cones = json::array();
    for (const auto& p : res.cones) cones.push_back(cone_json(p));
    r.result("cones", cones);
    json eig = json::array();
    for (std::size_t j = 0; j < res.map.G.size(); ++j) {
        json G = json::array();
        for (const auto& g : res.map.G[j]) G.push_back(to_json(g));
        eig.push_back({{"kind", "twistor"}, {"name", "h" + std::to_string(j + 1)}, {"G", G}});
    }
    r.result("eigenfunctions", eig);
    json verdicts = json::object();
    for (const auto& v : res.verdicts) {
        verdicts[v.name] = verify_json(v.report);
        verdicts[v.name]["gram_remainder"] = v.gram;
        verdicts[v.name]["branch_difference"] = v.single_valued;
        verdicts[v.name]["probe_slopes"] = v.probe_slopes;
        r.at_most(v.name + ": eigen residual / sup |u|", v.report.max_residual / std::max(v.report.sup_u, 1e-300),
                  opt.residual_tol);
        r.at_most(v.name + ": branch difference", v.single_valued, 1e-8 * (1 + v.report.sup_u));
        r.at_least(v.name + ": remainder off span (phi, e_i)", v.gram, opt.gram_min);
        double worst = 0;
        for (double s : v.probe_slopes) worst = std::min(worst, s);
        r.at_least(v.name + ": smallest log-log slope at the cones", worst, -0.05);
    }
    r.result("verification", verdicts);
    r.at_most("real eigenfunctions short of 2(m - 1)",
              std::abs(static_cast<double>(res.verdicts.size()) - 2.0 * (m - 1)), 0.0);
    return r;
}

// ---------------------------------------------------------- reproductions

double intro_equivalence(const TwistedRational& f, int k, double alpha, int points, std::uint64_t seed) {
    const double lam = std::pow((k - alpha) / (std::sqrt(2.0) * (2 * k - alpha)), 1.0 / k);
    const auto g = intro_map(k - alpha, k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rad(0.4, 2.0), arg(-3.0, 3.0);
    cplx ratio = 0.0;
    double worst = 0;
    for (int i = 0; i < points; ++i) {
        const auto q = CoverPoint::on_branch(std::polar(rad(rng), arg(rng)), 0);
        const cplx t = f(CoverPoint::from_log(q.log + std::log(lam))) / g(q);
        if (i == 0) ratio = t;
        worst = std::max(worst, std::abs(t - ratio) / std::abs(ratio));
    }
    return worst;
}

Report reproduce_ex1() {
    Report r("reproduce ex1");
    ScanOptions opt;
    opt.excluded = {0.0, 8.0};
    ScanRequest pos{"ex1", 1.0, 7.0, opt, std::vector<double>{4.0}, 1e-8};
    r.absorb(scan_report(pos), "scan [1,7]/");
    Report at4 = residues_report(ex1_family(4.0), 0, 1e-9);
    r.absorb(at4, "b = 4/");
    // the residue carries (b + 4), not (b - 4): the admissible member sits at -4
    ScanRequest neg{"ex1", -7.0, -1.0, opt, std::vector<double>{-4.0}, 1e-8};
    r.absorb(scan_report(neg), "scan [-7,-1]/");
    r.absorb(residues_report(ex1_family(-4.0), 0, 1e-9), "b = -4/");
    r.absorb(weierstrass_report(ex1_final_map()), "weierstrass b = -4/");
    r.note("the scan of [1,7] is expected to find 4; the residue vanishes at b = -4 instead");
    return r;
}

Report reproduce_intro(double beta, int k, const GridOptions& g, double tol) {
    Report r("reproduce intro");
    r.param("beta", beta);
    r.param("k", k);
    r.param("grid", g.grid);
    r.param("exclusion", g.exclusion);
    r.param("h", g.h);
    r.param("tolerance", tol);
    const auto f = intro_map(beta, k);
    const DevelopingMap F(f);
    const auto cones = cone_points(f);
    const Grid grid = grid_for(g, cones);
    const auto h = intro_candidate(beta, k);
    json out;
    eigen_checks(r, "Re h", h.real_part(), F, grid, g.h, tol, 0.1, out);
    eigen_checks(r, "Im h", h.imag_part(), F, grid, g.h, tol, 0.1, out);
    r.result("eigen", out);
    r.result("grid_points", grid.points.size());
    return r;
}

Report reproduce_construct(int m, int k, double alpha, std::uint64_t seed) {
    ConstructionOptions opt;
    opt.seed = seed;
    Report r("reproduce construct-m" + std::to_string(m));
    Report c = construct_report(m, k, alpha, opt);
    r.absorb(c, "");
    if (!c.results().contains("map")) return r;
    const auto f = map_from_json(c.results().at("map"));
    if (m == 2) {
        const double spread = intro_equivalence(f, k, alpha);
        r.result("intro_equivalence_spread", spread);
        r.at_most("f(lambda z) / intro(z) relative spread (20 points)", spread, 1e-8);
    }
    const auto cls = classify(make_metric(f));
    r.result("monodromy", to_string(cls.kind));
    r.holds("monodromy reducible", cls.kind == MonodromyClass::reducible);
    if (cls.axis) r.at_most("axis off e3", 1.0 - std::abs(cls.axis->z()), 1e-9);
    return r;
}

Report reproduce_noextra(std::uint64_t seed, int configs) {
    Report r("reproduce noextra");
    r.param("seed", seed);
    r.param("configurations", configs);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    json dims = json::object();
    for (int n = 1; n <= 8; ++n) {
        int wrong = 0;
        for (int c = 0; c < configs; ++c) {
            const bool inf = c % 2 == 1;
            std::vector<cplx> pts;
            while (static_cast<int>(pts.size()) < n - (inf ? 1 : 0)) pts.emplace_back(2 * g(rng), 2 * g(rng));
            const auto basis = qd_basis(pts, inf);
            const int expect = std::max(0, n - 3);
            if (static_cast<int>(basis.size()) != expect) ++wrong;
            if (c == 0) dims[std::to_string(n)] = basis.size();
        }
        r.at_most(std::to_string(n) + " cone points: configurations off dimension max(0, n - 3)", wrong, 0.0);
    }
    r.result("dimension", dims);
    return r;
}

}  // namespace sphcone
