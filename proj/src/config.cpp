#include "hetnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace hetnet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  T v{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
    throw ConfigError(key, "cannot parse '" + std::string(text) + "'");
  return v;
}

bool parse_bool(const std::string& key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const SimConfig&)> get;
  std::function<void(SimConfig&, const std::string&, std::string_view)> set;
};

template <typename T, typename Access>
Field number(const char* section, const char* key, Access access) {
  return {section, key,
          [access](const SimConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return fmt(access(const_cast<SimConfig&>(c)));
            else return std::to_string(access(const_cast<SimConfig&>(c)));
          },
          [access](SimConfig& c, const std::string& k, std::string_view v) { access(c) = parse_number<T>(k, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"scenario", "preset", [](const SimConfig& c) { return std::string(to_string(c.preset.environment)); },
                 [](SimConfig& c, const std::string& k, std::string_view v) {
                   try {
                     c.preset.environment = environment_from_string(std::string(v));
                   } catch (const std::invalid_argument& e) {
                     throw ConfigError(k, e.what());
                   }
                 }});
    f.push_back(number<double>("scenario", "macro_radius_m", [](SimConfig& c) -> double& { return c.preset.macro_radius_m; }));
    f.push_back(number<double>("scenario", "phantom_radius_m", [](SimConfig& c) -> double& { return c.preset.phantom_radius_m; }));
    f.push_back(number<double>("scenario", "macro_power_dbm", [](SimConfig& c) -> double& { return c.preset.macro_power_dbm; }));
    f.push_back(number<double>("scenario", "phantom_power_dbm", [](SimConfig& c) -> double& { return c.preset.phantom_power_dbm; }));
    f.push_back(number<int>("scenario", "macro_users", [](SimConfig& c) -> int& { return c.preset.macro_users; }));
    f.push_back(number<int>("scenario", "phantom_cells", [](SimConfig& c) -> int& { return c.preset.phantom_cells; }));
    f.push_back(number<int>("scenario", "users_per_phantom", [](SimConfig& c) -> int& { return c.preset.users_per_phantom; }));
    f.push_back(number<int>("scenario", "subcarriers_f1", [](SimConfig& c) -> int& { return c.preset.subcarriers_f1; }));
    f.push_back(number<int>("scenario", "subcarriers_f2", [](SimConfig& c) -> int& { return c.preset.subcarriers_f2; }));
    f.push_back(number<double>("scenario", "bandwidth_hz", [](SimConfig& c) -> double& { return c.preset.bandwidth_hz; }));
    f.push_back(number<double>("scenario", "ring_fraction", [](SimConfig& c) -> double& { return c.preset.ring_fraction; }));
    f.push_back(number<double>("scenario", "wall_loss_db", [](SimConfig& c) -> double& { return c.preset.propagation.wall_loss_db; }));
    f.push_back(number<double>("scenario", "shadow_sigma_db", [](SimConfig& c) -> double& { return c.preset.propagation.shadow_sigma_db; }));
    f.push_back(number<double>("scenario", "noise_psd_dbm_hz", [](SimConfig& c) -> double& { return c.preset.propagation.noise_psd_dbm_hz; }));
    f.push_back({"scenario", "per_subcarrier_fading",
                 [](const SimConfig& c) { return std::string(c.preset.propagation.per_subcarrier_fading ? "true" : "false"); },
                 [](SimConfig& c, const std::string& k, std::string_view v) { c.preset.propagation.per_subcarrier_fading = parse_bool(k, v); }});
    f.push_back(number<int>("scenario", "cross_phantom_walls", [](SimConfig& c) -> int& { return c.preset.propagation.cross_phantom_walls; }));

    f.push_back(number<int>("solver", "restarts", [](SimConfig& c) -> int& { return c.f1.solver.restarts; }));
    f.push_back(number<int>("solver", "nlp_max_iterations", [](SimConfig& c) -> int& { return c.f1.solver.max_iterations; }));
    f.push_back(number<double>("solver", "nlp_tolerance", [](SimConfig& c) -> double& { return c.f1.solver.tolerance; }));
    f.push_back(number<double>("solver", "armijo", [](SimConfig& c) -> double& { return c.f1.solver.armijo; }));
    f.push_back(number<double>("solver", "constraint_tolerance", [](SimConfig& c) -> double& { return c.f1.solver.constraint_tolerance; }));
    f.push_back(number<int>("solver", "max_penalty_rounds", [](SimConfig& c) -> int& { return c.f1.solver.max_penalty_rounds; }));
    f.push_back(number<int>("solver", "f1_max_outer", [](SimConfig& c) -> int& { return c.f1.max_outer; }));
    f.push_back(number<double>("solver", "f1_tolerance", [](SimConfig& c) -> double& { return c.f1.tolerance; }));
    f.push_back(number<int>("solver", "f2_max_iterations", [](SimConfig& c) -> int& { return c.f2.max_iterations; }));
    f.push_back(number<double>("solver", "f2_tolerance", [](SimConfig& c) -> double& { return c.f2.tolerance; }));
    f.push_back(number<double>("solver", "f2_step_scale", [](SimConfig& c) -> double& { return c.f2.step_scale; }));
    f.push_back({"solver", "f2_prune",
                 [](const SimConfig& c) { return std::string(c.f2.prune ? "true" : "false"); },
                 [](SimConfig& c, const std::string& k, std::string_view v) { c.f2.prune = parse_bool(k, v); }});

    f.push_back(number<std::uint64_t>("run", "seed", [](SimConfig& c) -> std::uint64_t& { return c.seed; }));
    f.push_back(number<int>("run", "trials", [](SimConfig& c) -> int& { return c.trials; }));
    f.push_back({"run", "r_min", [](const SimConfig& c) { return format_rate_target(c.r_min); },
                 [](SimConfig& c, const std::string& k, std::string_view v) {
                   try {
                     c.r_min = parse_rate_target(v);
                   } catch (const std::invalid_argument&) {
                     throw ConfigError(k, "cannot parse '" + std::string(v) + "'");
                   }
                 }});
    f.push_back({"run", "rmin_max", [](const SimConfig& c) { return format_rate_target(c.rmin_max); },
                 [](SimConfig& c, const std::string& k, std::string_view v) {
                   try {
                     c.rmin_max = parse_rate_target(v);
                   } catch (const std::invalid_argument&) {
                     throw ConfigError(k, "cannot parse '" + std::string(v) + "'");
                   }
                 }});
    f.push_back(number<int>("run", "rmin_points", [](SimConfig& c) -> int& { return c.rmin_points; }));
    f.push_back({"run", "rmin_grid",
                 [](const SimConfig& c) {
                   std::string s;
                   for (double g : c.rmin_grid) s += (s.empty() ? "" : " ") + fmt(g);
                   return s;
                 },
                 [](SimConfig& c, const std::string& k, std::string_view v) {
                   c.rmin_grid.clear();
                   std::istringstream in{std::string(v)};
                   std::string token;
                   while (in >> token) c.rmin_grid.push_back(parse_number<double>(k, token));
                 }});
    f.push_back(number<int>("run", "validate_instances", [](SimConfig& c) -> int& { return c.validate_instances; }));
    f.push_back({"run", "out", [](const SimConfig& c) { return c.out; },
                 [](SimConfig& c, const std::string&, std::string_view v) { c.out = std::string(v); }});
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields())
    if (key == f.key && (section.empty() || section == f.section)) return &f;
  return nullptr;
}

}  // namespace

RateTarget parse_rate_target(std::string_view text) {
  text = trim(text);
  RateTarget t;
  if (!text.empty() && (text.back() == 'x' || text.back() == 'X')) {
    t.relative = true;
    text.remove_suffix(1);
  }
  const auto r = std::from_chars(text.data(), text.data() + text.size(), t.value);
  if (text.empty() || r.ec != std::errc{} || r.ptr != text.data() + text.size())
    throw std::invalid_argument("cannot parse rate target '" + std::string(text) + "'");
  return t;
}

std::string format_rate_target(const RateTarget& target) { return fmt(target.value) + (target.relative ? "x" : ""); }

ExperimentConfig SimConfig::experiment() const {
  ExperimentConfig e;
  e.preset = preset;
  e.preset.trials = trials;
  e.r_min = r_min.value;
  e.r_min_relative = r_min.relative;
  e.f1 = f1;
  e.f2 = f2;
  return e;
}

SimConfig parse_config(std::string_view text) {
  struct Item {
    std::string section, key, value;
  };
  std::vector<Item> items;
  std::string section;
  std::istringstream lines{std::string(text)};
  std::string raw;
  while (std::getline(lines, raw)) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(std::string(line), "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "scenario" && section != "solver" && section != "run")
        throw ConfigError(section, "unknown section");
      continue;
    }
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string_view::npos) end = line.size();
      const std::string_view part = trim(line.substr(start, end - start));
      start = end + 1;
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw ConfigError(std::string(part), "expected key=value");
      items.push_back({section, std::string(trim(part.substr(0, eq))), std::string(trim(part.substr(eq + 1)))});
    }
  }

  SimConfig config;
  for (const Item& item : items) {
    if (item.key == "preset") {
      find_field(item.section, "preset")->set(config, item.key, item.value);
      config.preset = Preset::of(config.preset.environment);
    }
  }
  std::map<std::string, int> seen;
  for (const Item& item : items) {
    const Field* field = find_field(item.section, item.key);
    if (!field) {
      if (!item.section.empty() && find_field("", item.key))
        throw ConfigError(item.key, "key does not belong to section [" + item.section + "]");
      throw ConfigError(item.key, "unknown key");
    }
    if (++seen[item.key] > 1) throw ConfigError(item.key, "duplicate key");
    if (item.key != "preset") field->set(config, item.key, item.value);
  }
  config.preset.trials = config.trials;
  validate(config);
  return config;
}

void set_value(SimConfig& config, const std::string& key, std::string_view value) {
  const Field* field = find_field("", key);
  if (!field) throw ConfigError(key, "unknown key");
  field->set(config, key, trim(value));
  if (key == "preset") config.preset = Preset::of(config.preset.environment);
  if (key == "trials") config.preset.trials = config.trials;
}

std::string serialize(const SimConfig& config) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    if (section != f.section) {
      section = f.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(config) + "\n";
  }
  return out;
}

void validate(const SimConfig& c) {
  auto require = [](bool ok, const char* key, const char* message) {
    if (!ok) throw ConfigError(key, message);
  };
  const Preset& p = c.preset;
  require(p.macro_radius_m > 0, "macro_radius_m", "must be > 0");
  require(p.phantom_radius_m > 1, "phantom_radius_m", "must exceed the 1 m minimum link distance");
  require(p.macro_users >= 1, "macro_users", "must be >= 1");
  require(p.phantom_cells >= 1, "phantom_cells", "must be >= 1");
  require(p.users_per_phantom >= 1, "users_per_phantom", "must be >= 1");
  require(p.subcarriers_f1 >= 1, "subcarriers_f1", "must be >= 1");
  require(p.subcarriers_f2 >= 1, "subcarriers_f2", "must be >= 1");
  require(p.bandwidth_hz > 0, "bandwidth_hz", "must be > 0");
  require(p.ring_fraction > 0 && p.ring_fraction < 1, "ring_fraction", "must be in (0, 1)");
  require(p.propagation.shadow_sigma_db >= 0, "shadow_sigma_db", "must be >= 0");
  require(p.propagation.cross_phantom_walls >= 0, "cross_phantom_walls", "must be >= 0");
  require(c.f1.solver.restarts >= 1, "restarts", "must be >= 1");
  require(c.f1.solver.max_iterations >= 1, "nlp_max_iterations", "must be >= 1");
  require(c.f1.solver.tolerance > 0, "nlp_tolerance", "must be > 0");
  require(c.f1.solver.armijo > 0 && c.f1.solver.armijo < 1, "armijo", "must be in (0, 1)");
  require(c.f1.solver.constraint_tolerance > 0, "constraint_tolerance", "must be > 0");
  require(c.f1.solver.max_penalty_rounds >= 1, "max_penalty_rounds", "must be >= 1");
  require(c.f1.max_outer >= 1, "f1_max_outer", "must be >= 1");
  require(c.f1.tolerance > 0, "f1_tolerance", "must be > 0");
  require(c.f2.max_iterations >= 1, "f2_max_iterations", "must be >= 1");
  require(c.f2.tolerance > 0, "f2_tolerance", "must be > 0");
  require(c.f2.step_scale > 0, "f2_step_scale", "must be > 0");
  require(c.trials >= 1, "trials", "must be >= 1");
  require(c.r_min.value >= 0, "r_min", "must be >= 0");
  require(c.rmin_max.value > 0, "rmin_max", "must be > 0");
  require(c.rmin_points >= 2, "rmin_points", "must be >= 2");
  for (std::size_t g = 0; g < c.rmin_grid.size(); ++g) {
    require(c.rmin_grid[g] >= 0, "rmin_grid", "values must be >= 0");
    require(g == 0 || c.rmin_grid[g] > c.rmin_grid[g - 1], "rmin_grid", "must be strictly increasing");
  }
  require(c.validate_instances >= 1, "validate_instances", "must be >= 1");
  require(!c.out.empty(), "out", "must not be empty");
}

std::string config_hash(const SimConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool operator==(const SimConfig& a, const SimConfig& b) { return serialize(a) == serialize(b); }

}  // namespace hetnet
