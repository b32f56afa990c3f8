#include "sphcone/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>

#include <CLI11.hpp>

#include "sphcone/pipelines.hpp"

namespace sphcone {

namespace {

TwistedRational load_map(const std::string& path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_input, path + ": " + e.what());
    }
    return map_from_json(j);
}

json load_json(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_input, path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error(Errc::invalid_input, "cannot write " + path);
    o << text;
}

bool is_input_error(Errc c) {
    return c == Errc::invalid_input || c == Errc::alpha_mismatch || c == Errc::outside_family;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"spherical conical metrics: cones, monodromy, residues, Weierstrass and twistor constructions"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_path;
    bool timing = false;
    app.add_option("-o,--output", out_path, "write the report here instead of standard output");
    app.add_flag("--timing", timing, "add wall time to the report (breaks byte stability)");

    std::function<Report()> job;
    std::string csv_path;
    std::string csv_text;

    std::string map_path;
    auto add_map = [&](CLI::App* s) { s->add_option("-f,--map", map_path, "map JSON")->required(); };

    auto* cones = app.add_subcommand("cones", "cone points of a developing map");
    add_map(cones);
    cones->callback([&] { job = [&] { return cones_report(load_map(map_path)); }; });

    auto* mono = app.add_subcommand("monodromy", "monodromy generators and classification");
    add_map(mono);
    mono->callback([&] { job = [&] { return monodromy_report(load_map(map_path)); }; });

    int basis = 0;
    double res_tol = 1e-9;
    auto* res = app.add_subcommand("residues", "residues of sigma/df at integer cone points");
    add_map(res);
    res->add_option("--basis", basis, "index into the quadratic-differential basis")->capture_default_str();
    res->add_option("--tol", res_tol, "residue tolerance")->capture_default_str();
    res->callback([&] { job = [&] { return residues_report(load_map(map_path), basis, res_tol); }; });

    ScanRequest scan;
    std::vector<double> expect;
    auto* sc = app.add_subcommand("scan", "scan a one-parameter family for vanishing residues");
    sc->add_option("--family", scan.family, "family name (ex1)")->capture_default_str();
    sc->add_option("--lo", scan.lo)->capture_default_str();
    sc->add_option("--hi", scan.hi)->capture_default_str();
    sc->add_option("--samples", scan.opt.samples)->capture_default_str()->check(CLI::PositiveNumber);
    sc->add_option("--zero-tol", scan.opt.zero_tol)->capture_default_str();
    sc->add_option("--exclude", scan.opt.excluded, "parameter values where the family degenerates");
    sc->add_option("--expect", expect, "roots the scan must find");
    sc->add_option("--csv", csv_path, "write b,|residue| samples as CSV");
    sc->callback([&] {
        if (scan.hi <= scan.lo) throw CLI::ValidationError("--hi", "must exceed --lo");
        if (!expect.empty()) scan.expect = expect;
        job = [&] { return scan_report(scan, csv_path.empty() ? nullptr : &csv_text); };
    });

    WeierstrassRequest wr;
    std::string z0 = "1,0.5";
    auto* we = app.add_subcommand("weierstrass", "closure, support function and boundedness");
    add_map(we);
    we->add_option("--basis", wr.basis_index)->capture_default_str();
    we->add_option("--z0", z0, "base point re,im")->capture_default_str();
    we->add_option("--closure-tol", wr.closure_tol)->capture_default_str();
    we->add_option("--residual-tol", wr.residual_tol)->capture_default_str();
    we->add_option("--grid", wr.grid.grid)->capture_default_str();
    we->add_option("--exclusion", wr.grid.exclusion)->capture_default_str();
    we->add_option("--step", wr.grid.h, "difference step")->capture_default_str();
    we->callback([&] {
        job = [&] {
            wr.z0 = parse_complex(z0);
            return weierstrass_report(load_map(map_path), wr);
        };
    });

    GridOptions vg;
    double vtol = 1e-5;
    std::string eig_path;
    auto* ve = app.add_subcommand("verify", "eigen-residual of a candidate on a grid");
    add_map(ve);
    ve->add_option("-e,--eigen", eig_path, "eigenfunction JSON")->required();
    ve->add_option("--grid", vg.grid)->capture_default_str();
    ve->add_option("--exclusion", vg.exclusion)->capture_default_str();
    ve->add_option("--step", vg.h, "difference step")->capture_default_str();
    ve->add_option("--tol", vtol)->capture_default_str();
    ve->callback([&] { job = [&] { return verify_report(load_map(map_path), load_json(eig_path), vg, vtol); }; });

    int m = 2, k = 2;
    double alpha = 1.5;
    ConstructionOptions copt;
    auto* co = app.add_subcommand("construct", "the twistor construction for (m, k, alpha)");
    co->add_option("--m", m)->required();
    co->add_option("--k", k)->required();
    co->add_option("--alpha", alpha)->required();
    co->add_option("--seed", copt.seed)->capture_default_str();
    co->add_option("--retries", copt.retries)->capture_default_str();
    co->add_option("--grid", copt.grid)->capture_default_str();
    co->add_option("--residual-tol", copt.residual_tol)->capture_default_str();
    co->callback([&] { job = [&] { return construct_report(m, k, alpha, copt); }; });

    std::string name;
    double beta = 0.5;
    std::uint64_t seed = 1;
    auto* re = app.add_subcommand("reproduce", "the worked examples end to end");
    re->add_option("name", name, "ex1 | intro | construct-m2 | construct-m3 | noextra")
        ->required()
        ->check(CLI::IsMember({"ex1", "intro", "construct-m2", "construct-m3", "noextra"}));
    auto* kopt = re->add_option("--k", k);
    auto* aopt = re->add_option("--alpha", alpha);
    re->add_option("--beta", beta)->capture_default_str();
    re->add_option("--seed", seed)->capture_default_str();
    re->callback([&] {
        job = [&, kopt, aopt] {
            if (name == "ex1") return reproduce_ex1();
            if (name == "noextra") return reproduce_noextra(seed);
            if (name == "intro") return reproduce_intro(beta, kopt->count() ? k : 2);
            if (name == "construct-m2")
                return reproduce_construct(2, kopt->count() ? k : 2, aopt->count() ? alpha : 1.5, seed);
            return reproduce_construct(3, kopt->count() ? k : 4, aopt->count() ? alpha : 0.7, seed);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    Report rep("failed");
    try {
        rep = job();
    } catch (const Error& e) {
        if (is_input_error(e.code())) {
            err << e.what() << "\n";
            return 2;
        }
        // a diagnostic report for mathematical breakdowns
        rep = Report(app.get_subcommands().front()->get_name());
        rep.note(e.what());
        rep.holds(std::string("completed without ") + errc_name(e.code()), false);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 2;
    }
    if (timing) rep.wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    try {
        if (!csv_path.empty()) write_file(csv_path, csv_text);
        if (out_path.empty())
            out << render(rep);
        else
            write_file(out_path, render(rep));
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 2;
    }
    return rep.pass() ? 0 : 1;
}

}  // namespace sphcone
