#pragma once

// Versioned JSON reports: every verdict carries the measured value and the
// tolerance it was held to.  Keys are sorted, so identical runs give
// identical bytes (wall time only on request).

#include <string>
#include <vector>

#include "sphcone/json_io.hpp"

namespace sphcone {

inline constexpr const char* report_schema = "sphcone.report/1";

struct Check {
    std::string name;
    double value = 0;
    double tolerance = 0;
    std::string relation;  // "<=" or ">="
    bool pass = false;
};

class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    // value <= tol
    const Check& at_most(std::string name, double value, double tol);
    // value >= tol
    const Check& at_least(std::string name, double value, double tol);
    // a yes/no verdict, reported as value 1 or 0 against 1
    const Check& holds(std::string name, bool ok);
    const Check& add(Check c);
    // checks, results and notes of `other`, names prefixed
    void absorb(const Report& other, const std::string& prefix);

    void param(const std::string& key, json v) { params_[key] = std::move(v); }
    void input(const std::string& name, const std::string& bytes) { inputs_[name] = digest_hex(bytes); }
    void result(const std::string& key, json v) { results_[key] = std::move(v); }
    void note(std::string s) { notes_.push_back(std::move(s)); }
    void wall_time(double seconds) { wall_ = seconds; }

    bool pass() const;
    const std::vector<Check>& checks() const noexcept { return checks_; }
    const json& results() const noexcept { return results_; }
    json to_json() const;

private:
    std::string command_;
    json params_ = json::object();
    json inputs_ = json::object();
    json results_ = json::object();
    std::vector<Check> checks_;
    std::vector<std::string> notes_;
    double wall_ = -1;
};

// writes `dump(2)` plus a newline
std::string render(const Report& r);

}  // namespace sphcone
