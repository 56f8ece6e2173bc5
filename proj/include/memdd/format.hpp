#pragma once

#include <string>

namespace memdd {

// Canonical text rendering of a 64-bit float: 17 significant digits,
// round-trips bit-exactly and re-prints byte-identically.
std::string format_g17(double v);

// Strict full-token numeric parses; return false on any leftover bytes.
bool parse_double_strict(const std::string& tok, double& out);
bool parse_int_strict(const std::string& tok, long long& out);

}  // namespace memdd
