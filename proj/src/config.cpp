#include "ksns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ksns/csv.hpp"
#include "ksns/error.hpp"

namespace ksns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

struct LineError {
  int line;
  std::string key;
  [[noreturn]] void operator()(const std::string& msg) const {
    throw ValidationError("config line " + std::to_string(line) + " (" + key + "): " + msg);
  }
};

double to_double(const std::string& s, const LineError& err) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) err("'" + s + "' is not a number");
  if (!std::isfinite(v)) err("value must be finite");
  return v;
}

long long to_int(const std::string& s, const LineError& err) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) err("'" + s + "' is not an integer");
  return v;
}

std::uint64_t to_u64(const std::string& s, const LineError& err) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) err("'" + s + "' is not an unsigned 64-bit integer");
  return v;
}

template <class F>
auto wrap(const LineError& err, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    err(e.what());
  }
}

using Setter = std::function<void(RunConfig&, const std::string&, const LineError&)>;

struct Key {
  std::string section;
  Setter set;
};

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> k = {
      {"dim", {"grid", [](RunConfig& c, const std::string& v, const LineError& e) {
         const long long d = to_int(v, e);
         if (d != 2 && d != 3) e("dim must be 2 or 3");
         c.dim = static_cast<int>(d);
       }}},
      {"cells", {"grid", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.cells.clear();
         for (const auto& s : split_list(v, ',')) {
           const long long n = to_int(s, e);
           if (n < 4 || n > (1 << 20)) e("cells must be >= 4 per axis");
           c.cells.push_back(static_cast<int>(n));
         }
       }}},
      {"extents", {"grid", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.extents.clear();
         for (const auto& s : split_list(v, ',')) {
           const double x = to_double(s, e);
           if (!(x > 0.0)) e("extents must be positive");
           c.extents.push_back(x);
         }
       }}},
      {"eps", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.eps = to_double(v, e);
         if (!(c.eps > 0.0 && c.eps <= 1.0)) e("eps must lie in (0, 1]");
       }}},
      {"yosida_eps", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.yosida_eps = to_double(v, e);
         if (*c.yosida_eps < 0.0) e("yosida_eps must be >= 0");
       }}},
      {"kappa", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) { c.kappa = to_double(v, e); }}},
      {"sensitivity", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.sensitivity = wrap(e, [&] { return sensitivity_kind_from_string(v); });
       }}},
      {"cs", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.cs = to_double(v, e);
         if (c.cs < 0.0) e("cs must be >= 0");
       }}},
      {"alpha", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.alpha = to_double(v, e);
         if (c.alpha < 1.0) e("alpha must be >= 1: the global theory requires alpha >= 1");
       }}},
      {"theta", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) { c.theta = to_double(v, e); }}},
      {"table", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.table.clear();
         if (v.empty()) return;
         for (const auto& item : split_list(v, ',')) {
           const auto ns = split_list(item, ':');
           if (ns.size() != 2) e("table entries are n:s pairs");
           c.table.emplace_back(to_double(ns[0], e), to_double(ns[1], e));
         }
       }}},
      {"phi", {"physics", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.phi = wrap(e, [&] { return phi_kind_from_string(v); });
       }}},
      {"phi_strength",
       {"physics", [](RunConfig& c, const std::string& v, const LineError& e) { c.phi_strength = to_double(v, e); }}},
      {"T", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.t_end = to_double(v, e);
         if (!(c.t_end > 0.0)) e("T must be positive");
       }}},
      {"cfl", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.cfl = to_double(v, e);
         if (!(c.cfl > 0.0 && c.cfl <= 1.0)) e("cfl must lie in (0, 1]");
       }}},
      {"dt", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         if (v == "adaptive") {
           c.fixed_dt.reset();
           return;
         }
         c.fixed_dt = to_double(v, e);
         if (!(*c.fixed_dt > 0.0)) e("dt must be positive or 'adaptive'");
       }}},
      {"scenario", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.scenario = wrap(e, [&] { return initial_kind_from_string(v == "steady_state" ? "steady" : v); });
       }}},
      {"amplitude", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         c.amplitude = to_double(v, e);
         if (*c.amplitude < 0.0) e("amplitude must be >= 0");
       }}},
      {"seed", {"run", [](RunConfig& c, const std::string& v, const LineError& e) { c.seed = to_u64(v, e); }}},
      {"csv_every", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         const long long n = to_int(v, e);
         if (n < 1 || n > 1'000'000'000) e("csv_every must be a positive integer");
         c.csv_every = static_cast<int>(n);
       }}},
      {"snapshot_every", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         const long long n = to_int(v, e);
         if (n < 0 || n > 1'000'000'000) e("snapshot_every must be >= 0");
         c.snapshot_every = static_cast<int>(n);
       }}},
      {"out", {"run", [](RunConfig& c, const std::string& v, const LineError& e) {
         if (v.empty()) e("out must not be empty");
         c.out_dir = v;
       }}},
  };
  return k;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  std::map<std::string, int> line_of;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "physics" && section != "run")
        throw ValidationError("config line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const LineError err{lineno, key};
    const auto it = keys().find(key);
    if (it == keys().end()) err("unknown key");
    if (section.empty()) err("key outside of any section");
    if (it->second.section != section) err("key belongs to section [" + it->second.section + "]");
    if (!seen.insert(key).second) err("duplicate key");
    line_of[key] = lineno;
    it->second.set(c, value, err);
  }
  for (const char* req : {"dim", "cells", "extents", "T", "scenario"})
    if (!seen.count(req)) throw ValidationError(std::string("config: missing required key '") + req + "'");

  const LineError cells_err{line_of["cells"], "cells"};
  if (static_cast<int>(c.cells.size()) == 1) c.cells.assign(c.dim, c.cells.front());
  if (static_cast<int>(c.cells.size()) != c.dim) cells_err("expected " + std::to_string(c.dim) + " entries");
  const LineError ext_err{line_of["extents"], "extents"};
  if (static_cast<int>(c.extents.size()) == 1) c.extents.assign(c.dim, c.extents.front());
  if (static_cast<int>(c.extents.size()) != c.dim) ext_err("expected " + std::to_string(c.dim) + " entries");
  if (c.sensitivity == SensitivityKind::user_table && c.table.empty())
    throw ValidationError("config: sensitivity = user_table needs a table");
  // Cross-field checks (table shape, random amplitude) reuse the library validation.
  try {
    (void)SensitivitySpec::make(c.sensitivity, c.cs, c.alpha, c.theta, c.table);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("config [physics]: ") + e.what());
  }
  if (c.scenario == InitialKind::random_perturbation && c.amplitude && *c.amplitude >= 1.0)
    LineError{line_of["amplitude"], "amplitude"}("random_perturbation needs amplitude < 1");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  auto list = [](const auto& v, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
  };
  os << "[grid]\n";
  os << "dim = " << c.dim << '\n';
  os << "cells = " << list(c.cells, [](int n) { return std::to_string(n); }) << '\n';
  os << "extents = " << list(c.extents, format_double) << '\n';
  os << "\n[physics]\n";
  os << "eps = " << format_double(c.eps) << '\n';
  if (c.yosida_eps) os << "yosida_eps = " << format_double(*c.yosida_eps) << '\n';
  os << "kappa = " << format_double(c.kappa) << '\n';
  os << "sensitivity = " << to_string(c.sensitivity) << '\n';
  os << "cs = " << format_double(c.cs) << '\n';
  os << "alpha = " << format_double(c.alpha) << '\n';
  os << "theta = " << format_double(c.theta) << '\n';
  os << "table = "
     << list(c.table, [](const std::pair<double, double>& p) { return format_double(p.first) + ":" + format_double(p.second); })
     << '\n';
  os << "phi = " << to_string(c.phi) << '\n';
  os << "phi_strength = " << format_double(c.phi_strength) << '\n';
  os << "\n[run]\n";
  os << "T = " << format_double(c.t_end) << '\n';
  os << "cfl = " << format_double(c.cfl) << '\n';
  os << "dt = " << (c.fixed_dt ? format_double(*c.fixed_dt) : "adaptive") << '\n';
  os << "scenario = " << to_string(c.scenario) << '\n';
  if (c.amplitude) os << "amplitude = " << format_double(*c.amplitude) << '\n';
  os << "seed = " << c.seed << '\n';
  os << "csv_every = " << c.csv_every << '\n';
  os << "snapshot_every = " << c.snapshot_every << '\n';
  os << "out = " << c.out_dir << '\n';
  return os.str();
}

Grid RunConfig::grid() const { return make_grid(dim, extents, cells); }

SimParams RunConfig::sim_params() const {
  SimParams p;
  p.grid = grid();
  p.sensitivity = SensitivitySpec::make(sensitivity, cs, alpha, theta, table);
  p.eps = eps;
  p.yosida_eps = yosida_eps;
  p.kappa = kappa;
  p.phi = {phi, phi_strength};
  p.t_end = t_end;
  p.cfl = cfl;
  p.fixed_dt = fixed_dt;
  p.diag_every = csv_every;
  p.snapshot_every = snapshot_every;
  p.validate();
  return p;
}

InitialSpec RunConfig::initial() const { return {scenario, amplitude.value_or(default_amplitude(scenario)), seed}; }

}  // namespace ksns
