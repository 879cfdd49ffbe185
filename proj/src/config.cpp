#include "lifschitz/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "lifschitz/errors.hpp"
#include "lifschitz/io.hpp"

namespace lifschitz {

namespace {

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigurationError(key + ": " + what);
}

double to_double(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || errno == ERANGE) bad(key, "expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno == ERANGE) bad(key, "expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  char* end = nullptr;
  errno = 0;
  if (!s.empty() && s[0] == '-') bad(key, "expected an unsigned integer, got '" + v + "'");
  const unsigned long long x = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno == ERANGE) bad(key, "expected an unsigned integer, got '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double x) { return io::fmt(x); }

template <class T, class F>
std::string join(const std::vector<T>& xs, F f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += f(xs[i]);
  }
  return out;
}

std::string geometry_name(GeometryKind g) {
  switch (g) {
    case GeometryKind::torus: return "torus";
    case GeometryKind::ball: return "ball";
    case GeometryKind::box: return "box";
  }
  return "torus";
}

KeySpec real_key(std::string name, double RunConfig::*field) {
  return {name, [name, field](RunConfig& c, const std::string& v) { c.*field = to_double(name, v); },
          [field](const RunConfig& c) { return num(c.*field); }};
}

template <class I>
KeySpec int_key(std::string name, I RunConfig::*field) {
  return {name,
          [name, field](RunConfig& c, const std::string& v) {
            const long long x = to_integer(name, v);
            if (x < std::numeric_limits<I>::min() || x > std::numeric_limits<I>::max()) bad(name, "out of range");
            c.*field = static_cast<I>(x);
          },
          [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

KeySpec text_key(std::string name, std::string RunConfig::*field) {
  return {name, [field](RunConfig& c, const std::string& v) { c.*field = trim(v); },
          [field](const RunConfig& c) { return c.*field; }};
}

KeySpec real_list_key(std::string name, std::vector<double> RunConfig::*field) {
  return {name,
          [name, field](RunConfig& c, const std::string& v) {
            std::vector<double> xs;
            for (const auto& item : split_list(v)) xs.push_back(to_double(name, item));
            c.*field = std::move(xs);
          },
          [field](const RunConfig& c) { return join(c.*field, num); }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back({"run.experiment",
                 [](RunConfig& c, const std::string& v) { c.experiment = experiment_from_string(trim(v)); },
                 [](const RunConfig& c) { return to_string(c.experiment); }});
    t.push_back({"run.seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("run.seed", v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    t.push_back(text_key("run.out", &RunConfig::out));
    t.push_back(int_key("run.workers", &RunConfig::workers));

    t.push_back(int_key("model.d", &RunConfig::d));
    t.push_back(real_key("model.alpha", &RunConfig::alpha));
    t.push_back(real_key("model.kappa", &RunConfig::kappa));

    t.push_back(text_key("coupling.law", &RunConfig::coupling));
    t.push_back(real_key("coupling.p0", &RunConfig::p0));
    t.push_back(real_key("coupling.level", &RunConfig::level));
    t.push_back(real_key("coupling.vmax", &RunConfig::vmax));
    t.push_back(real_key("coupling.rate", &RunConfig::rate));
    t.push_back(real_list_key("coupling.values", &RunConfig::atom_values));
    t.push_back(real_list_key("coupling.probs", &RunConfig::atom_probs));

    t.push_back(text_key("profile.shape", &RunConfig::profile));
    t.push_back(real_key("profile.radius", &RunConfig::profile_radius));
    t.push_back(real_key("profile.inner_radius", &RunConfig::profile_inner));
    t.push_back(real_key("profile.height", &RunConfig::profile_height));

    t.push_back({"geometry.kind",
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = trim(v);
                   if (s == "torus") c.geometry = GeometryKind::torus;
                   else if (s == "ball") c.geometry = GeometryKind::ball;
                   else if (s == "box") c.geometry = GeometryKind::box;
                   else bad("geometry.kind", "expected torus, ball or box, got '" + s + "'");
                 },
                 [](const RunConfig& c) { return geometry_name(c.geometry); }});
    t.push_back(int_key("geometry.period", &RunConfig::period));
    t.push_back(real_key("geometry.radius", &RunConfig::radius));

    t.push_back({"grid.N",
                 [](RunConfig& c, const std::string& v) {
                   std::vector<int> ns;
                   for (const auto& item : split_list(v)) {
                     const long long n = to_integer("grid.N", item);
                     if (n < 1 || n > 1'000'000) bad("grid.N", "resolution out of range: " + item);
                     ns.push_back(static_cast<int>(n));
                   }
                   c.resolution = std::move(ns);
                 },
                 [](const RunConfig& c) { return join(c.resolution, [](int n) { return std::to_string(n); }); }});
    t.push_back(int_key("grid.embed_factor", &RunConfig::embed_factor));

    t.push_back(int_key("budget.n_disorder", &RunConfig::n_disorder));
    t.push_back(int_key("budget.n_paths", &RunConfig::n_paths));
    t.push_back(int_key("budget.n_steps", &RunConfig::n_steps));

    t.push_back(real_list_key("curve.t", &RunConfig::t_grid));
    t.push_back(real_list_key("curve.lambda", &RunConfig::lambda_grid));
    t.push_back(real_key("curve.window_lo", &RunConfig::window_lo));
    t.push_back(real_key("curve.window_hi", &RunConfig::window_hi));
    return t;
  }();
  return table;
}

const KeySpec& find_key(const std::string& key) {
  const auto& table = key_table();
  for (const auto& k : table)
    if (k.name == key) return k;
  // bare key: accept a unique suffix match
  if (key.find('.') == std::string::npos) {
    const KeySpec* hit = nullptr;
    for (const auto& k : table) {
      if (k.name.substr(k.name.find('.') + 1) == key) {
        if (hit) bad(key, "ambiguous key, qualify it with a section");
        hit = &k;
      }
    }
    if (hit) return *hit;
  }
  bad(key, "unknown key");
}

void check_increasing(const std::string& key, const std::vector<double>& xs) {
  if (xs.empty()) bad(key, "grid must not be empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !std::isfinite(xs[i])) bad(key, "grid values must be positive and finite");
    if (i && !(xs[i] > xs[i - 1])) bad(key, "grid must be strictly increasing");
  }
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::eig: return "eig";
    case Experiment::ids: return "ids";
    case Experiment::laplace_spectral: return "laplace-spectral";
    case Experiment::laplace_mc: return "laplace-mc";
    case Experiment::fit: return "fit";
    case Experiment::check: return "check";
  }
  return "check";
}

Experiment experiment_from_string(const std::string& s) {
  for (auto e : {Experiment::eig, Experiment::ids, Experiment::laplace_spectral, Experiment::laplace_mc,
                 Experiment::fit, Experiment::check})
    if (to_string(e) == s) return e;
  bad("run.experiment", "expected one of eig, ids, laplace-spectral, laplace-mc, fit, check; got '" + s + "'");
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 20; ++k) g.push_back(0.02 * std::pow(2.0, 0.5 * k));
  return g;
}

CouplingDistribution RunConfig::distribution() const {
  if (coupling == "bernoulli") return CouplingDistribution::bernoulli(p0, level);
  if (coupling == "uniform") return CouplingDistribution::uniform(vmax);
  if (coupling == "exponential") return CouplingDistribution::exponential(rate);
  if (coupling == "point_masses") {
    if (atom_values.size() != atom_probs.size()) bad("coupling.values", "needs one probability per value");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < atom_values.size(); ++i) atoms.push_back({atom_values[i], atom_probs[i]});
    return CouplingDistribution::point_masses(std::move(atoms));
  }
  bad("coupling.law", "expected bernoulli, uniform, exponential or point_masses, got '" + coupling + "'");
}

SingleSiteProfile RunConfig::single_site() const {
  if (profile == "indicator") return SingleSiteProfile::indicator(profile_radius, profile_height);
  if (profile == "bump") return SingleSiteProfile::bump(profile_radius, profile_inner, profile_height, profile_height);
  bad("profile.shape", "expected indicator or bump, got '" + profile + "'");
}

void validate(const RunConfig& c) {
  if (c.d < 1 || c.d > 3) bad("model.d", "must be 1, 2 or 3");
  if (!(c.alpha > 0.0 && c.alpha <= 2.0)) bad("model.alpha", "must lie in (0, 2], got " + num(c.alpha));
  if (!(c.kappa >= 0.0) || !std::isfinite(c.kappa)) bad("model.kappa", "must be >= 0");
  try {
    (void)c.distribution();
  } catch (const ConfigurationError&) {
    throw;
  } catch (const std::exception& e) {
    bad("coupling." + (c.coupling == "bernoulli" ? std::string("p0") : c.coupling == "uniform" ? std::string("vmax")
                       : c.coupling == "exponential" ? std::string("rate") : std::string("values")),
        e.what());
  }
  try {
    (void)c.single_site();
  } catch (const ConfigurationError&) {
    throw;
  } catch (const std::exception& e) {
    bad("profile.radius", e.what());
  }
  if (c.period < 1) bad("geometry.period", "must be >= 1");
  if (!(c.radius > 0.0) || !std::isfinite(c.radius)) bad("geometry.radius", "must be positive");
  if (c.resolution.empty()) bad("grid.N", "needs at least one resolution");
  for (std::size_t i = 0; i < c.resolution.size(); ++i) {
    if (c.resolution[i] < 2) bad("grid.N", "resolutions must be >= 2");
    if (i && c.resolution[i] <= c.resolution[i - 1]) bad("grid.N", "resolutions must be strictly increasing");
  }
  if (c.embed_factor != 0 && c.embed_factor < 3) bad("grid.embed_factor", "must be 0 (free lattice kernel) or >= 3");
  if (c.n_disorder < 1) bad("budget.n_disorder", "must be >= 1");
  if (c.n_paths < 1) bad("budget.n_paths", "must be >= 1");
  if (c.n_steps < 2) bad("budget.n_steps", "must be >= 2");
  check_increasing("curve.t", c.t_grid);
  check_increasing("curve.lambda", c.lambda_grid);
  if (c.window_lo != 0.0 || c.window_hi != 0.0) {
    if (!(c.window_lo > 0.0 && c.window_hi > c.window_lo)) bad("curve.window_lo", "window needs 0 < lo < hi");
  }
  if (c.out.empty()) bad("run.out", "must not be empty");
  if (c.workers < 0) bad("run.workers", "must be >= 0");
}

void apply_overrides(RunConfig& config, const std::vector<std::pair<std::string, std::string>>& overrides) {
  for (const auto& [key, value] : overrides) find_key(key).set(config, value);
}

RunConfig parse_config(const std::string& text, bool check) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad("line " + std::to_string(lineno), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad("line " + std::to_string(lineno), "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    const auto& spec = find_key(key);
    if (!seen.insert(spec.name).second) bad(spec.name, "given twice");
    spec.set(c, value);
  }
  if (check) validate(c);
  return c;
}

std::string to_ini(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    const auto dot = k.name.find('.');
    const std::string s = k.name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += "[" + s + "]\n";
      section = s;
    }
    out += k.name.substr(dot + 1) + " = " + k.get(config) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LIFSCHITZ_LAB_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 1024L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace lifschitz
