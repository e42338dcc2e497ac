#pragma once

#include <string>

#include "qoco/ogd.hpp"

namespace qoco {

// Transcript CSV layout, columns in order:
//   t, x0..x{n-1}, z0..z{n-1}, loss, g0..g{n-1}, eta, r, r_prime, queries
// Header row mandatory; reals printed with 17 significant digits so parsing
// reproduces every double bit-exactly.
std::string transcript_to_csv(const Transcript& transcript);
Transcript transcript_from_csv(const std::string& text);

// True when the CSV-representable fields of every round agree bit-exactly.
bool rounds_equal(const Transcript& a, const Transcript& b);

// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace qoco
