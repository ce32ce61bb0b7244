#include "fixterm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fixterm {

namespace {

struct Field {
  const char* section;
  const char* key;
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

[[noreturn]] void fail(const Field& f, const std::string& why) {
  throw Error(ErrorKind::Parse, std::string("[") + f.section + "]." + f.key + ": " + why);
}

template <class T>
T parse_number(const Field& f, const std::string& raw) {
  // trim spaces left by the ini reader
  const auto b = raw.find_first_not_of(" \t");
  const auto e = raw.find_last_not_of(" \t");
  if (b == std::string::npos) fail(f, "empty value");
  const char* first = raw.data() + b;
  const char* last = raw.data() + e + 1;
  if (*first == '+') ++first;
  T v{};
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(f, "not a number: '" + raw + "'");
  return v;
}

Field real(const char* sec, const char* key, std::function<double&(Scenario&)> ref,
           std::function<bool(double)> ok, const char* rule) {
  Field f{sec, key, nullptr, nullptr};
  f.set = [f, ref, ok, rule](Scenario& s, const std::string& raw) {
    const double v = parse_number<double>(f, raw);
    if (!ok(v)) fail(f, rule);
    ref(s) = v;
  };
  f.get = [ref](const Scenario& s) {
    Scenario c = s;
    return format_exact(ref(c));
  };
  return f;
}

template <class I>
Field integer(const char* sec, const char* key, std::function<I&(Scenario&)> ref, I min) {
  Field f{sec, key, nullptr, nullptr};
  f.set = [f, ref, min](Scenario& s, const std::string& raw) {
    const I v = parse_number<I>(f, raw);
    if (v < min) fail(f, "must be >= " + std::to_string(min));
    ref(s) = v;
  };
  f.get = [ref](const Scenario& s) {
    Scenario c = s;
    return std::to_string(ref(c));
  };
  return f;
}

bool finite(double v) { return std::isfinite(v); }
bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool unit_open(double v) { return v > 0.0 && v < 1.0; }
bool exponent(double v) { return std::isfinite(v) && v < 1.0 && v != 0.0; }

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> v;
    v.push_back(real("market", "r", [](Scenario& s) -> double& { return s.market.r; }, positive,
                     "must be positive"));
    v.push_back(real("market", "mu", [](Scenario& s) -> double& { return s.market.mu; }, finite,
                     "must be finite"));
    v.push_back(real("market", "sigma", [](Scenario& s) -> double& { return s.market.sigma; },
                     positive, "must be positive"));
    v.push_back(real("illiquid", "f0", [](Scenario& s) -> double& { return s.illiquid.f0; },
                     positive, "must be positive"));
    v.push_back(real("illiquid", "mu_f", [](Scenario& s) -> double& { return s.illiquid.mu_f; },
                     finite, "must be finite"));
    v.push_back(real(
        "illiquid", "sigma_f", [](Scenario& s) -> double& { return s.illiquid.sigma_f; },
        [](double x) { return std::isfinite(x) && x >= 0.0; }, "must be non-negative"));
    v.push_back(real("prefs", "p1", [](Scenario& s) -> double& { return s.prefs.p1; }, exponent,
                     "must be below 1 and nonzero"));
    v.push_back(real("prefs", "p2", [](Scenario& s) -> double& { return s.prefs.p2; }, exponent,
                     "must be below 1 and nonzero"));
    v.push_back(real("constraints", "c_floor",
                     [](Scenario& s) -> double& { return s.constraints.c_floor; }, positive,
                     "must be positive"));
    v.push_back(real("constraints", "v_floor",
                     [](Scenario& s) -> double& { return s.constraints.v_floor; }, positive,
                     "must be positive"));
    v.push_back(real("run", "T", [](Scenario& s) -> double& { return s.horizon; }, positive,
                     "must be positive"));
    v.push_back(real("run", "v0", [](Scenario& s) -> double& { return s.v0; }, positive,
                     "must be positive"));
    v.push_back(real("numerics", "bisect_tol",
                     [](Scenario& s) -> double& { return s.numerics.bisect_tol; }, unit_open,
                     "must lie in (0, 1)"));
    v.push_back(integer<int>("numerics", "quad_nodes",
                             [](Scenario& s) -> int& { return s.numerics.quad_nodes; }, 1));
    v.push_back(integer<int>("numerics", "psi_grid",
                             [](Scenario& s) -> int& { return s.numerics.psi_grid; }, 3));
    v.push_back(real("numerics", "fd_rel_step",
                     [](Scenario& s) -> double& { return s.numerics.fd_rel_step; }, unit_open,
                     "must lie in (0, 1)"));
    v.push_back(integer<int>("numerics", "mc_paths",
                             [](Scenario& s) -> int& { return s.numerics.mc_paths; }, 1));
    v.push_back(integer<int>("numerics", "mc_steps",
                             [](Scenario& s) -> int& { return s.numerics.mc_steps; }, 1));
    v.push_back(integer<std::uint64_t>(
        "numerics", "seed", [](Scenario& s) -> std::uint64_t& { return s.numerics.seed; }, 0));
    return v;
  }();
  return all;
}

const Field* find_field(const std::string& sec, const std::string& key) {
  for (const auto& f : fields())
    if (sec == f.section && key == f.key) return &f;
  return nullptr;
}

}  // namespace

std::string format_exact(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

Scenario parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Parse, "malformed config (line " + std::to_string(e.line()) +
                                      "): " + e.message());
  }
  Scenario s = base_scenario();
  for (const auto& [sec, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error(ErrorKind::Parse, "key '" + sec + "' outside any section");
    bool known_section = false;
    for (const auto& f : fields()) known_section |= sec == f.section;
    if (!known_section) throw Error(ErrorKind::Parse, "unknown section [" + sec + "]");
    for (const auto& [key, val] : body) {
      const Field* f = find_field(sec, key);
      if (!f) throw Error(ErrorKind::Parse, "unknown key [" + sec + "]." + key);
      f->set(s, val.data());
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  return s;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const Scenario& s) {
  std::string out, current;
  for (const auto& f : fields()) {
    if (current != f.section) {
      if (!current.empty()) out += "\n";
      current = f.section;
      out += "[" + current + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(s) + "\n";
  }
  return out;
}

}  // namespace fixterm
