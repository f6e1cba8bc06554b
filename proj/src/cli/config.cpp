#include "varineq/cli/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "varineq/errors.hpp"

namespace varineq::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ParseError(what + ": '" + t + "' is not a number");
  }
  if (pos != t.size()) throw ParseError(what + ": '" + t + "' is not a number");
  return v;
}

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
  return true;
}

const std::set<std::string> kKinds = {"verify", "sweep", "dual", "evolve", "spectrum"};

}  // namespace

const std::string& JobSpec::str(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ParseError("job '" + id + "': missing key '" + key + "'");
  return it->second;
}

std::string JobSpec::str(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double JobSpec::num(const std::string& key) const { return to_double(str(key), "job '" + id + "' key '" + key + "'"); }

double JobSpec::num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

int JobSpec::integer(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = num(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError("job '" + id + "' key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

std::vector<double> JobSpec::list(const std::string& key) const {
  try {
    return parse_grid(str(key));
  } catch (const ParseError& e) {
    throw ParseError("job '" + id + "' key '" + key + "': " + e.what());
  }
}

std::vector<double> parse_grid(const std::string& raw) {
  const std::string s = trim(raw);
  std::vector<double> out;
  if (s.empty()) return out;
  if (s.find(':') != std::string::npos) {
    std::vector<double> p;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ':')) p.push_back(to_double(part, "grid"));
    if (p.size() != 3) throw ParseError("grid '" + s + "' must be start:stop:step");
    if (!(p[2] > 0.0) || p[1] < p[0]) throw ParseError("grid '" + s + "' needs step > 0 and stop >= start");
    const long n = static_cast<long>(std::floor((p[1] - p[0]) / p[2] + 1e-9)) + 1;
    if (n > 1000000) throw ParseError("grid '" + s + "' has too many points");
    for (long k = 0; k < n; ++k) out.push_back(p[0] + k * p[2]);
    return out;
  }
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(to_double(part, "grid"));
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.source = text;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  enum { kNone, kSuite, kJob } section = kNone;
  std::set<std::string> ids;
  std::set<std::string> seen;  // keys of the current table
  auto fail = [&](const std::string& msg) { throw ParseError(origin + ":" + std::to_string(lineno) + ": " + msg); };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' || line[i] == ';') {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string head = trim(line.substr(1, line.size() - 2));
      seen.clear();
      if (head == "suite") {
        section = kSuite;
        continue;
      }
      if (head.rfind("job", 0) == 0 && head.size() > 3 && (head[3] == ' ' || head[3] == '\t')) {
        const std::string id = trim(head.substr(4));
        if (!valid_id(id)) fail("job id '" + id + "' must use letters, digits, '-', '_' or '.'");
        if (!ids.insert(id).second) fail("duplicate job id '" + id + "'");
        JobSpec j;
        j.id = id;
        j.line = lineno;
        cfg.jobs.push_back(std::move(j));
        section = kJob;
        continue;
      }
      fail("unknown section '" + head + "'");
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (!seen.insert(key).second) fail("duplicate key '" + key + "'");
    if (section == kNone) fail("key outside a section");
    if (section == kSuite) {
      if (key == "name") {
        cfg.name = value;
      } else if (key == "seed") {
        try {
          std::size_t pos = 0;
          cfg.seed = std::stoull(value, &pos);
          if (pos != value.size() || value.find('-') != std::string::npos) throw std::invalid_argument("seed");
        } catch (const std::exception&) {
          fail("seed must be an unsigned integer");
        }
      } else if (key == "tol") {
        try {
          cfg.tol = to_double(value, "tol");
        } catch (const ParseError& e) {
          fail(e.what());
        }
      } else {
        fail("unknown suite key '" + key + "'");
      }
      continue;
    }
    JobSpec& j = cfg.jobs.back();
    if (key == "kind") {
      if (!kKinds.count(value)) fail("unknown job kind '" + value + "'");
      j.kind = value;
    }
    j.values[key] = value;
  }
  for (const auto& j : cfg.jobs) {
    if (j.kind.empty()) throw ParseError(origin + ":" + std::to_string(j.line) + ": job '" + j.id + "' has no kind");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace varineq::cli
