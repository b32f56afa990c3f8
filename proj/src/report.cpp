#include "sphcone/report.hpp"

#include <algorithm>
#include <cmath>

namespace sphcone {

namespace {

// NaN fails any comparison, and JSON has no NaN: report it as a string
json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

const Check& Report::at_most(std::string name, double value, double tol) {
    checks_.push_back({std::move(name), value, tol, "<=", value <= tol});
    return checks_.back();
}

const Check& Report::at_least(std::string name, double value, double tol) {
    checks_.push_back({std::move(name), value, tol, ">=", value >= tol});
    return checks_.back();
}

const Check& Report::holds(std::string name, bool ok) { return at_least(std::move(name), ok ? 1.0 : 0.0, 1.0); }

const Check& Report::add(Check c) {
    checks_.push_back(std::move(c));
    return checks_.back();
}

void Report::absorb(const Report& other, const std::string& prefix) {
    for (auto c : other.checks_) {
        c.name = prefix + c.name;
        checks_.push_back(std::move(c));
    }
    results_[prefix.empty() ? other.command_ : prefix.substr(0, prefix.size() - 1)] = other.results_;
    for (const auto& n : other.notes_) notes_.push_back(prefix + n);
}

bool Report::pass() const {
    return !checks_.empty() && std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
}

json Report::to_json() const {
    json j;
    j["schema"] = report_schema;
    j["command"] = command_;
    j["params"] = params_;
    j["inputs"] = inputs_;
    j["results"] = results_;
    json cs = json::array();
    for (const auto& c : checks_)
        cs.push_back({{"name", c.name},
                      {"value", number(c.value)},
                      {"tolerance", number(c.tolerance)},
                      {"relation", c.relation},
                      {"pass", c.pass}});
    j["checks"] = cs;
    j["notes"] = notes_;
    j["pass"] = pass();
    if (wall_ >= 0) j["wall_time_s"] = wall_;
    return j;
}

std::string render(const Report& r) { return r.to_json().dump(2) + "\n"; }

}  // namespace sphcone
