#pragma once

#include <string>

#include <json.hpp>

#include "sphcone/exp_algebra.hpp"

namespace sphcone {

using json = nlohmann::json;

// {"alpha": a, "num": [{"a","b","re","im"}, ...], "den": [...]}
json to_json(const TwistedRational& r);
TwistedRational map_from_json(const json& j);
json terms_to_json(const ExpPoly& p);
ExpPoly terms_from_json(double alpha, const json& j);

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

// "re,im" or "re" -> complex
cplx parse_complex(const std::string& s);

std::string read_text_file(const std::string& path);
// 64-bit FNV-1a, hex
std::string digest_hex(const std::string& bytes);

}  // namespace sphcone
