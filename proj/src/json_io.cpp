#include "sphcone/json_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sphcone {

json terms_to_json(const ExpPoly& p) {
    json arr = json::array();
    for (const auto& [e, c] : p.terms()) arr.push_back({{"a", e.a}, {"b", e.b}, {"re", c.real()}, {"im", c.imag()}});
    return arr;
}

ExpPoly terms_from_json(double alpha, const json& j) {
    if (!j.is_array()) throw Error(Errc::invalid_input, "term list must be an array");
    ExpPoly::TermMap m;
    for (const auto& t : j) {
        if (!t.is_object() || !t.contains("a") || !t.contains("b"))
            throw Error(Errc::invalid_input, "term needs integer fields a and b");
        if (!t["a"].is_number_integer() || !t["b"].is_number_integer())
            throw Error(Errc::invalid_input, "exponents must be integers");
        const double re = t.value("re", 0.0), im = t.value("im", 0.0);
        m[{t["a"].get<int>(), t["b"].get<int>()}] += cplx(re, im);
    }
    return ExpPoly(alpha, std::move(m));
}

json to_json(const TwistedRational& r) {
    return {{"alpha", r.alpha()}, {"num", terms_to_json(r.num())}, {"den", terms_to_json(r.den())}};
}

TwistedRational map_from_json(const json& j) {
    if (!j.is_object() || !j.contains("alpha") || !j.contains("num"))
        throw Error(Errc::invalid_input, "map needs alpha and num");
    if (!j["alpha"].is_number()) throw Error(Errc::invalid_input, "alpha must be a number");
    const double alpha = j["alpha"].get<double>();
    ExpPoly num = terms_from_json(alpha, j["num"]);
    ExpPoly den = j.contains("den") ? terms_from_json(alpha, j["den"]) : ExpPoly::constant(alpha, 1.0);
    if (den.is_zero()) throw Error(Errc::invalid_input, "denominator is zero");
    return TwistedRational(std::move(num), std::move(den));
}

json complex_to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    throw Error(Errc::invalid_input, "cannot read a complex number");
}

cplx parse_complex(const std::string& s) {
    double re = 0, im = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &tail) == 2) return {re, im};
    if (std::sscanf(s.c_str(), "%lf%c", &re, &tail) == 1) return re;
    throw Error(Errc::invalid_input, "cannot parse complex number '" + s + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::invalid_input, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sphcone
