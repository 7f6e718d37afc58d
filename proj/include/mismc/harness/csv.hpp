#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mismc {

// RFC 4180: fields containing commas, quotes or newlines are quoted with
// embedded quotes doubled.
std::string csv_escape(const std::string& field);

void csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trip decimal representation (via std::to_chars), so that
// reruns produce byte-identical files.
std::string format_double(double v);
std::string format_long(long v);

}  // namespace mismc
