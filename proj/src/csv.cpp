#include "qoco/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "qoco/errors.hpp"

namespace qoco {

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw RuntimeFault("transcript CSV: bad real value '" + s + "'");
  }
  return v;
}

long parse_int(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw RuntimeFault("transcript CSV: bad integer value '" + s + "'");
  }
  return v;
}

}  // namespace

std::string transcript_to_csv(const Transcript& transcript) {
  const int n = transcript.n;
  std::string out = "t";
  for (int j = 0; j < n; ++j) out += ",x" + std::to_string(j);
  for (int j = 0; j < n; ++j) out += ",z" + std::to_string(j);
  out += ",loss";
  for (int j = 0; j < n; ++j) out += ",g" + std::to_string(j);
  out += ",eta,r,r_prime,queries\n";
  for (const RoundRecord& rec : transcript.rounds) {
    out += std::to_string(rec.t);
    for (int j = 0; j < n; ++j) {
      out += ',';
      append_real(out, rec.x[j]);
    }
    for (int j = 0; j < n; ++j) {
      out += ',';
      append_real(out, rec.z[j]);
    }
    out += ',';
    append_real(out, rec.loss_value);
    for (int j = 0; j < n; ++j) {
      out += ',';
      append_real(out, rec.grad[j]);
    }
    out += ',';
    append_real(out, rec.eta);
    out += ',';
    append_real(out, rec.r);
    out += ',';
    append_real(out, rec.r_prime);
    out += ',' + std::to_string(rec.queries) + '\n';
  }
  return out;
}

Transcript transcript_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw RuntimeFault("transcript CSV: empty input");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 6 || header.front() != "t" || header.back() != "queries") {
    throw RuntimeFault("transcript CSV: unrecognized header");
  }
  // Columns: 1 + 3n + 5 in total.
  if ((header.size() - 6) % 3 != 0) throw RuntimeFault("transcript CSV: bad column count");
  const int n = static_cast<int>((header.size() - 6) / 3);
  if (n < 1) throw RuntimeFault("transcript CSV: no coordinate columns");

  Transcript tr;
  tr.n = n;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) throw RuntimeFault("transcript CSV: ragged row");
    RoundRecord rec;
    std::size_t k = 0;
    rec.t = static_cast<int>(parse_int(f[k++]));
    rec.x.resize(n);
    for (int j = 0; j < n; ++j) rec.x[j] = parse_real(f[k++]);
    rec.z.resize(n);
    for (int j = 0; j < n; ++j) rec.z[j] = parse_real(f[k++]);
    rec.loss_value = parse_real(f[k++]);
    rec.grad.resize(n);
    for (int j = 0; j < n; ++j) rec.grad[j] = parse_real(f[k++]);
    rec.eta = parse_real(f[k++]);
    rec.r = parse_real(f[k++]);
    rec.r_prime = parse_real(f[k++]);
    rec.queries = static_cast<int>(parse_int(f[k++]));
    tr.total_queries += static_cast<std::uint64_t>(rec.queries);
    tr.rounds.push_back(std::move(rec));
  }
  return tr;
}

bool rounds_equal(const Transcript& a, const Transcript& b) {
  if (a.n != b.n || a.rounds.size() != b.rounds.size()) return false;
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    const RoundRecord& ra = a.rounds[i];
    const RoundRecord& rb = b.rounds[i];
    if (ra.t != rb.t || ra.queries != rb.queries) return false;
    if (ra.x != rb.x || ra.z != rb.z || ra.grad != rb.grad) return false;
    if (ra.loss_value != rb.loss_value || ra.eta != rb.eta || ra.r != rb.r ||
        ra.r_prime != rb.r_prime) {
      return false;
    }
  }
  return true;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw RuntimeFault("cannot open '" + tmp.string() + "' for writing");
    os << content;
    if (!os.flush()) throw RuntimeFault("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw RuntimeFault("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace qoco
