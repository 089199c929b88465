#include "gpmem/config.hpp"

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "gpmem/csv_io.hpp"
#include "gpmem/error.hpp"

namespace gpmem {

namespace fs = std::filesystem;

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::set<std::string> kKernelKeys{"form", "alpha_sq", "decay", "amplitude", "weight",
                                         "shift", "power",    "coeff", "file",      "terms"};

const std::map<std::string, std::set<std::string>> kSectionKeys{
    {"run", {"command", "method"}},
    {"geometry", {"length"}},
    {"control", {"form", "file"}},
    {"time", {"T", "dt"}},
    {"space", {"nx", "x_max", "probes"}},
    {"frequency", {"z_min", "z_max", "n_radii", "slopes"}},
    {"contour", {"type", "nodes", "shift", "tolerance", "max_nodes", "adaptive", "abscissa", "cutoff"}},
    {"tolerances", {"gate", "k", "consistency", "k0", "speed", "threshold_factor", "threshold_floor"}},
    {"output", {"dir"}},
    {"invert", {"record", "T_obs", "k_dt", "k_horizon", "consistency_check"}},
    {"uniqueness", {"T", "delta", "coeff"}},
    {"nonsobolev", {"n_max", "p", "modes", "growth_modes", "n_max_values", "t_max", "t_step", "t_probe", "growth_guard"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

bool is_kernel_section(const std::string& name) { return name == "kernel" || name.rfind("kernel.", 0) == 0; }

std::map<std::string, Section> tokenize(const std::string& text) {
  std::map<std::string, Section> out;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') parse_fail(line, "unterminated section header");
      current = trim(s.substr(1, s.size() - 2));
      if (!is_kernel_section(current) && !kSectionKeys.count(current)) parse_fail(line, "unknown section [" + current + "]");
      if (out.count(current)) parse_fail(line, "section [" + current + "] repeated");
      out[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key = value");
    if (current.empty()) parse_fail(line, "key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const bool known = is_kernel_section(current) ? kKernelKeys.count(key) > 0 : kSectionKeys.at(current).count(key) > 0;
    if (!known) parse_fail(line, "unknown key '" + key + "' in [" + current + "]");
    if (value.empty()) parse_fail(line, "empty value for '" + key + "'");
    auto& sec = out[current];
    if (sec.count(key)) parse_fail(line, "duplicate key '" + key + "' in [" + current + "]");
    sec[key] = Entry{value, line};
  }
  return out;
}

double to_double(const Entry& e, const std::string& key) {
  if (e.value == "inf" || e.value == "+inf") return INFINITY;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE) parse_fail(e.line, "'" + key + "' is not a number: " + e.value);
  return v;
}

int to_int(const Entry& e, const std::string& key) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE || v < -1000000000L || v > 1000000000L) {
    parse_fail(e.line, "'" + key + "' is not an integer: " + e.value);
  }
  return static_cast<int>(v);
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  parse_fail(e.line, "'" + key + "' must be true or false");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

// Typed access to one section; keys are checked against the allow-list
// earlier, so a missing key here just means "use the default".
class Reader {
 public:
  explicit Reader(const Section* sec) : sec_(sec) {}

  void get(const std::string& key, double& out) const {
    if (const Entry* e = find(key)) out = to_double(*e, key);
  }
  void get(const std::string& key, int& out) const {
    if (const Entry* e = find(key)) out = to_int(*e, key);
  }
  void get(const std::string& key, bool& out) const {
    if (const Entry* e = find(key)) out = to_bool(*e, key);
  }
  void get(const std::string& key, std::string& out) const {
    if (const Entry* e = find(key)) out = e->value;
  }
  void get(const std::string& key, std::vector<double>& out) const {
    if (const Entry* e = find(key)) {
      out.clear();
      for (const auto& item : split_list(e->value)) out.push_back(to_double(Entry{item, e->line}, key));
    }
  }
  void get(const std::string& key, std::vector<int>& out) const {
    if (const Entry* e = find(key)) {
      out.clear();
      for (const auto& item : split_list(e->value)) out.push_back(to_int(Entry{item, e->line}, key));
    }
  }
  bool has(const std::string& key) const { return find(key) != nullptr; }
  int line(const std::string& key) const { return find(key) ? find(key)->line : 0; }

 private:
  const Entry* find(const std::string& key) const {
    if (!sec_) return nullptr;
    const auto it = sec_->find(key);
    return it == sec_->end() ? nullptr : &it->second;
  }
  const Section* sec_;
};

class Problems {
 public:
  void add(const std::string& msg) { list_.push_back(msg); }
  void check(bool ok, const std::string& msg) {
    if (!ok) add(msg);
  }
  void raise_if_any() const {
    if (list_.empty()) return;
    std::string msg = std::to_string(list_.size()) + " invalid setting(s):";
    for (const auto& p : list_) msg += "\n  - " + p;
    throw Error(ErrorCode::ValidationError, msg);
  }

 private:
  std::vector<std::string> list_;
};

fs::path resolve(const fs::path& base, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : base / p;
}

const std::map<std::string, std::set<std::string>> kFormParams{
    {"constant", {"alpha_sq"}},
    {"exponential", {"decay", "amplitude"}},
    {"polynomial_half_square", {}},
    {"dirac_delta", {"weight"}},
    {"shifted_power", {"shift", "power", "coeff"}},
    {"sampled", {"file"}},
    {"sum", {"terms"}},
};

std::optional<MemoryKernel> build_kernel(const std::map<std::string, Section>& secs, const std::string& name,
                                         const fs::path& base, Problems& problems, int depth) {
  const auto it = secs.find(name);
  if (it == secs.end()) {
    problems.add("kernel section [" + name + "] is missing");
    return std::nullopt;
  }
  const Reader r(&it->second);
  std::string form;
  r.get("form", form);
  if (form.empty()) {
    problems.add("[" + name + "] needs a form");
    return std::nullopt;
  }
  const auto fp = kFormParams.find(form);
  if (fp == kFormParams.end()) {
    problems.add("[" + name + "] unknown kernel form '" + form + "'");
    return std::nullopt;
  }
  bool stray = false;
  for (const auto& [key, entry] : it->second) {
    if (key != "form" && !fp->second.count(key)) {
      problems.add("[" + name + "] line " + std::to_string(entry.line) + ": '" + key + "' does not apply to form " + form);
      stray = true;
    }
  }
  if (stray) return std::nullopt;

  try {
    if (form == "constant") {
      double alpha_sq = 1.0;
      r.get("alpha_sq", alpha_sq);
      problems.check(alpha_sq > 0.0, "[" + name + "] alpha_sq must be > 0");
      return MemoryKernel::constant(alpha_sq);
    }
    if (form == "exponential") {
      double decay = 1.0, amplitude = 1.0;
      r.get("decay", decay);
      r.get("amplitude", amplitude);
      problems.check(decay >= 0.0, "[" + name + "] decay must be >= 0");
      return MemoryKernel::exponential(decay, amplitude);
    }
    if (form == "polynomial_half_square") return MemoryKernel::polynomial_half_square();
    if (form == "dirac_delta") {
      double weight = 1.0;
      r.get("weight", weight);
      problems.check(weight > 0.0, "[" + name + "] weight must be > 0");
      return MemoryKernel::dirac_delta(weight);
    }
    if (form == "shifted_power") {
      double shift = 0.0, coeff = 1.0;
      int power = 2;
      r.get("shift", shift);
      r.get("power", power);
      r.get("coeff", coeff);
      problems.check(shift >= 0.0, "[" + name + "] shift must be >= 0");
      problems.check(power >= 0, "[" + name + "] power must be >= 0");
      return MemoryKernel::shifted_power(shift, power, coeff);
    }
    if (form == "sampled") {
      std::string file;
      r.get("file", file);
      if (file.empty()) {
        problems.add("[" + name + "] sampled kernel needs a file");
        return std::nullopt;
      }
      const fs::path path = resolve(base, file);
      if (!fs::exists(path)) {
        problems.add("[" + name + "] kernel file not found: " + path.string());
        return std::nullopt;
      }
      return MemoryKernel::sampled(read_signal_csv(path));
    }
    // sum
    if (depth > 0) {
      problems.add("[" + name + "] nested sums are not supported");
      return std::nullopt;
    }
    std::string terms;
    r.get("terms", terms);
    std::vector<MemoryKernel> parts;
    bool ok = true;
    for (const auto& t : split_list(terms)) {
      auto k = build_kernel(secs, "kernel." + t, base, problems, depth + 1);
      if (k) parts.push_back(std::move(*k));
      else ok = false;
    }
    if (parts.empty() && ok) problems.add("[" + name + "] sum needs at least one term");
    if (!ok || parts.empty()) return std::nullopt;
    return MemoryKernel::sum(parts);
  } catch (const Error& e) {
    problems.add("[" + name + "] " + e.what());
    return std::nullopt;
  }
}

}  // namespace

std::optional<Command> command_from_name(const std::string& s) {
  static const std::map<std::string, Command> table{
      {"forward", Command::Forward},       {"response", Command::Response},
      {"invert", Command::Invert},         {"uniqueness", Command::Uniqueness},
      {"nonsobolev", Command::NonSobolev}, {"speedcheck", Command::SpeedCheck},
      {"validate", Command::Validate},
  };
  const auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Forward: return "forward";
    case Command::Response: return "response";
    case Command::Invert: return "invert";
    case Command::Uniqueness: return "uniqueness";
    case Command::NonSobolev: return "nonsobolev";
    case Command::SpeedCheck: return "speedcheck";
    case Command::Validate: return "validate";
  }
  return "?";
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir, std::optional<Command> command) {
  const auto secs = tokenize(text);
  auto section = [&](const std::string& name) {
    const auto it = secs.find(name);
    return Reader(it == secs.end() ? nullptr : &it->second);
  };

  RunConfig cfg;
  cfg.text = text;
  Problems problems;

  const Reader run = section("run");
  std::string cmd;
  run.get("command", cmd);
  if (command) {
    cfg.command = *command;
  } else if (cmd.empty()) {
    problems.add("[run] command is required");
  } else if (const auto c = command_from_name(cmd)) {
    cfg.command = *c;
  } else {
    problems.add("[run] unknown command '" + cmd + "'");
  }
  run.get("method", cfg.method);
  problems.check(cfg.method == "laplace" || cfg.method == "timedomain",
                 "[run] method must be laplace or timedomain, got '" + cfg.method + "'");

  if (secs.count("kernel")) {
    if (auto k = build_kernel(secs, "kernel", base_dir, problems, 0)) cfg.kernel = std::move(*k);
  } else if (cfg.command != Command::NonSobolev) {
    problems.add("[kernel] section is required");
  }

  section("geometry").get("length", cfg.geometry.length);
  problems.check(cfg.geometry.length > 0.0, "[geometry] length must be > 0");

  if (const auto k = secs.find("kernel"); k != secs.end()) {
    std::set<std::string> used;
    if (const auto t = k->second.find("terms"); t != k->second.end()) {
      for (const auto& name : split_list(t->second.value)) used.insert("kernel." + name);
    }
    for (const auto& [name, sec] : secs) {
      if (name.rfind("kernel.", 0) == 0 && !used.count(name)) problems.add("[" + name + "] is not listed in [kernel] terms");
    }
  }

  const Reader control = section("control");
  std::string cform = "ramp";
  control.get("form", cform);
  if (cform == "sampled") {
    std::string file;
    control.get("file", file);
    const fs::path path = resolve(base_dir, file);
    if (file.empty()) {
      problems.add("[control] sampled control needs a file");
    } else if (!fs::exists(path)) {
      problems.add("[control] control file not found: " + path.string());
    } else {
      try {
        cfg.control = BoundaryControl::sampled(read_signal_csv(path));
      } catch (const Error& e) {
        problems.add(std::string("[control] ") + e.what());
      }
    }
  } else if (cform != "ramp") {
    problems.add("[control] unknown form '" + cform + "'");
  } else if (control.has("file")) {
    problems.add("[control] file does not apply to the ramp");
  }

  const Reader time = section("time");
  time.get("T", cfg.time.T);
  time.get("dt", cfg.time.dt);
  problems.check(cfg.time.dt > 0.0, "[time] dt must be > 0");
  problems.check(cfg.time.T > 0.0 && std::isfinite(cfg.time.T), "[time] T must be finite and > 0");
  if (cfg.time.dt > 0.0 && cfg.time.T > 0.0) problems.check(cfg.time.dt <= cfg.time.T, "[time] dt must not exceed T");

  const Reader space = section("space");
  space.get("nx", cfg.space.nx);
  space.get("x_max", cfg.space.x_max);
  space.get("probes", cfg.space.probes);
  problems.check(cfg.space.nx >= 16, "[space] nx must be >= 16");
  problems.check(cfg.space.x_max >= 0.0, "[space] x_max must be >= 0");
  problems.check(!cfg.space.probes.empty(), "[space] probes must not be empty");
  for (double x : cfg.space.probes) problems.check(x > 0.0, "[space] probes must be > 0");

  const Reader freq = section("frequency");
  freq.get("z_min", cfg.frequency.z_min);
  freq.get("z_max", cfg.frequency.z_max);
  freq.get("n_radii", cfg.frequency.n_radii);
  freq.get("slopes", cfg.frequency.slopes);
  problems.check(cfg.frequency.z_min > 0.0, "[frequency] z_min must be > 0");
  problems.check(cfg.frequency.z_max >= cfg.frequency.z_min, "[frequency] z_max must be >= z_min");
  problems.check(cfg.frequency.n_radii >= 1, "[frequency] n_radii must be >= 1");
  problems.check(!cfg.frequency.slopes.empty(), "[frequency] slopes must not be empty");
  for (double s : cfg.frequency.slopes) problems.check(s >= 0.0, "[frequency] slopes must be >= 0");

  if (secs.count("contour")) {
    const Reader c = section("contour");
    std::string type = "talbot";
    c.get("type", type);
    cfg.contour_given = true;
    if (type == "talbot") {
      Talbot t;
      c.get("nodes", t.nodes);
      c.get("shift", t.shift);
      c.get("tolerance", t.tolerance);
      c.get("max_nodes", t.max_nodes);
      c.get("adaptive", t.adaptive);
      for (const char* k : {"abscissa", "cutoff"}) {
        if (c.has(k)) problems.add(std::string("[contour] '") + k + "' does not apply to talbot");
      }
      cfg.contour = t;
    } else if (type == "bromwich") {
      BromwichFFT b;
      c.get("abscissa", b.abscissa);
      c.get("cutoff", b.cutoff);
      c.get("nodes", b.nodes);
      for (const char* k : {"shift", "tolerance", "max_nodes", "adaptive"}) {
        if (c.has(k)) problems.add(std::string("[contour] '") + k + "' does not apply to bromwich");
      }
      cfg.contour = b;
    } else {
      problems.add("[contour] type must be talbot or bromwich");
    }
    try {
      validate_contour(cfg.contour);
    } catch (const Error& e) {
      problems.add(std::string("[contour] ") + e.what());
    }
  }

  const Reader tol = section("tolerances");
  ToleranceTable& t = cfg.tolerances;
  tol.get("gate", t.gate);
  tol.get("k", t.k);
  tol.get("consistency", t.consistency);
  tol.get("k0", t.k0);
  tol.get("speed", t.speed);
  tol.get("threshold_factor", t.threshold_factor);
  tol.get("threshold_floor", t.threshold_floor);
  for (const auto& [name, v] : {std::pair<const char*, double>{"gate", t.gate},
                                {"k", t.k},
                                {"consistency", t.consistency},
                                {"k0", t.k0},
                                {"speed", t.speed},
                                {"threshold_factor", t.threshold_factor},
                                {"threshold_floor", t.threshold_floor}}) {
    problems.check(v > 0.0 && std::isfinite(v), std::string("[tolerances] ") + name + " must be finite and > 0");
  }

  std::string dir;
  section("output").get("dir", dir);
  if (!dir.empty()) cfg.output_dir = resolve(base_dir, dir);

  const Reader inv = section("invert");
  std::string record;
  inv.get("record", record);
  if (!record.empty()) {
    cfg.invert.record = resolve(base_dir, record);
    if (!fs::exists(cfg.invert.record)) problems.add("[invert] record file not found: " + cfg.invert.record.string());
  }
  inv.get("T_obs", cfg.invert.T_obs);
  inv.get("k_dt", cfg.invert.k_dt);
  inv.get("k_horizon", cfg.invert.k_horizon);
  inv.get("consistency_check", cfg.invert.consistency_check);
  problems.check(cfg.invert.T_obs > 0.0 && std::isfinite(cfg.invert.T_obs), "[invert] T_obs must be finite and > 0");
  problems.check(cfg.invert.k_dt > 0.0, "[invert] k_dt must be > 0");
  problems.check(cfg.invert.k_horizon >= 0.0, "[invert] k_horizon must be >= 0");

  const Reader uq = section("uniqueness");
  uq.get("T", cfg.uniqueness.T);
  uq.get("delta", cfg.uniqueness.delta);
  uq.get("coeff", cfg.uniqueness.coeff);
  problems.check(cfg.uniqueness.T > 0.0, "[uniqueness] T must be > 0");
  problems.check(cfg.uniqueness.delta > 0.0, "[uniqueness] delta must be > 0");
  problems.check(cfg.uniqueness.coeff != 0.0, "[uniqueness] coeff must be nonzero");

  const Reader ns = section("nonsobolev");
  NonSobolevSpec& n = cfg.nonsobolev;
  ns.get("n_max", n.n_max);
  ns.get("p", n.p);
  ns.get("modes", n.modes);
  ns.get("growth_modes", n.growth_modes);
  ns.get("n_max_values", n.n_max_values);
  ns.get("t_max", n.t_max);
  ns.get("t_step", n.t_step);
  ns.get("t_probe", n.t_probe);
  ns.get("growth_guard", n.growth_guard);
  problems.check(n.n_max >= 1 && n.n_max <= 32, "[nonsobolev] n_max must lie in [1, 32]");
  problems.check(!n.modes.empty(), "[nonsobolev] modes must not be empty");
  for (int m : n.modes) problems.check(m >= 1 && m <= n.n_max, "[nonsobolev] modes must lie in [1, n_max]");
  for (int m : n.growth_modes) problems.check(m >= 1 && m <= n.n_max, "[nonsobolev] growth_modes must lie in [1, n_max]");
  problems.check(!n.n_max_values.empty(), "[nonsobolev] n_max_values must not be empty");
  for (int m : n.n_max_values) problems.check(m >= 1 && m <= 32, "[nonsobolev] n_max_values must lie in [1, 32]");
  problems.check(n.t_step > 0.0, "[nonsobolev] t_step must be > 0");
  problems.check(n.t_max > 0.0, "[nonsobolev] t_max must be > 0");
  problems.check(n.t_probe > 0.0, "[nonsobolev] t_probe must be > 0");
  problems.check(n.growth_guard > 0.0, "[nonsobolev] growth_guard must be > 0");

  problems.raise_if_any();
  return cfg;
}

RunConfig parse_config(const fs::path& path, std::optional<Command> command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path(), command);
}

}  // namespace gpmem
