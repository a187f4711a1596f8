#include "nsmhd/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nsmhd/errors.hpp"

namespace nsmhd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': expected a number, got '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  const double d = to_double(key, value);
  if (d != std::floor(d)) throw ConfigError("field '" + key + "': expected an integer");
  return int(d);
}

std::string fmt(double d) {
  std::ostringstream os;
  os << std::setprecision(17) << d;
  return os.str();
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::viscous ? "viscous" : "ideal"; }

Variant variant_from_string(const std::string& s) {
  if (s == "viscous") return Variant::viscous;
  if (s == "ideal") return Variant::ideal;
  throw ConfigError("field 'variant': expected viscous or ideal, got '" + s + "'");
}

void validate(const SimConfig& c) {
  if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0))
    throw ConfigError("field 'epsilon' must lie in [0, 1]");
  if (std::abs(c.zeta_v) > 1.0) throw ConfigError("field 'zeta_v' must satisfy |zeta| <= 1");
  if (std::abs(c.zeta_H) > 1.0) throw ConfigError("field 'zeta_H' must satisfy |zeta| <= 1");
  if (!(c.dt > 0.0)) throw ConfigError("field 'dt' must be positive");
  if (!(c.t_end >= 0.0)) throw ConfigError("field 't_end' must be non-negative");
  if (c.variant == Variant::ideal && c.epsilon != 0.0)
    throw ConfigError("field 'epsilon' must be 0 for the ideal variant");
  if (c.variant == Variant::viscous && c.epsilon == 0.0)
    throw ConfigError("field 'epsilon' must be positive for the viscous variant");
  if (c.record_every < 1) throw ConfigError("field 'record_every' must be >= 1");
  if (c.norm_every < 0) throw ConfigError("field 'norm_every' must be >= 0");
  if (c.norm_order < 1 || c.norm_order > 4) throw ConfigError("field 'norm_order' must be in [1, 4]");
  validate_grid(c.grid);
}

SimConfig parse_config(const std::string& text) {
  SimConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool zeta_set = false, zeta_v_set = false, zeta_H_set = false, eps_set = false;
  double zeta = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "epsilon") { c.epsilon = to_double(key, value); eps_set = true; }
    else if (key == "zeta") { zeta = to_double(key, value); zeta_set = true; }
    else if (key == "zeta_v") { c.zeta_v = to_double(key, value); zeta_v_set = true; }
    else if (key == "zeta_H") { c.zeta_H = to_double(key, value); zeta_H_set = true; }
    else if (key == "dt") c.dt = to_double(key, value);
    else if (key == "t_end") c.t_end = to_double(key, value);
    else if (key == "dim") c.grid.dim = to_int(key, value);
    else if (key == "n_tangential") c.grid.n_tangential = to_int(key, value);
    else if (key == "n_normal") c.grid.n_normal = to_int(key, value);
    else if (key == "ic") c.ic_name = value;
    else if (key.rfind("ic.", 0) == 0) c.ic_params[key.substr(3)] = to_double(key, value);
    else if (key == "seed") c.ic_params["seed"] = to_double(key, value);
    else if (key == "variant") c.variant = variant_from_string(value);
    else if (key == "record_every") c.record_every = to_int(key, value);
    else if (key == "norm_every") c.norm_every = to_int(key, value);
    else if (key == "norm_order") c.norm_order = to_int(key, value);
    else if (key == "checkpoint_dir") c.checkpoint_dir = value;
    else if (key == "checkpoint_times") {
      c.checkpoint_times.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ','))
        if (!trim(item).empty()) c.checkpoint_times.push_back(to_double(key, trim(item)));
    } else {
      throw ConfigError("unknown field '" + key + "' on line " + std::to_string(lineno));
    }
  }
  if (zeta_set) {
    if (!zeta_v_set) c.zeta_v = zeta;
    if (!zeta_H_set) c.zeta_H = zeta;
  }
  if (c.variant == Variant::ideal && !eps_set) c.epsilon = 0.0;
  validate(c);
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const SimConfig& c) {
  std::ostringstream os;
  os << "variant = " << to_string(c.variant) << "\n"
     << "epsilon = " << fmt(c.epsilon) << "\n"
     << "zeta_v = " << fmt(c.zeta_v) << "\n"
     << "zeta_H = " << fmt(c.zeta_H) << "\n"
     << "dt = " << fmt(c.dt) << "\n"
     << "t_end = " << fmt(c.t_end) << "\n"
     << "dim = " << c.grid.dim << "\n"
     << "n_tangential = " << c.grid.n_tangential << "\n"
     << "n_normal = " << c.grid.n_normal << "\n"
     << "ic = " << c.ic_name << "\n";
  for (const auto& [k, v] : c.ic_params) os << "ic." << k << " = " << fmt(v) << "\n";
  os << "record_every = " << c.record_every << "\n"
     << "norm_every = " << c.norm_every << "\n"
     << "norm_order = " << c.norm_order << "\n";
  if (!c.checkpoint_times.empty()) {
    os << "checkpoint_times = ";
    for (size_t i = 0; i < c.checkpoint_times.size(); ++i)
      os << (i ? ", " : "") << fmt(c.checkpoint_times[i]);
    os << "\n";
  }
  if (!c.checkpoint_dir.empty()) os << "checkpoint_dir = " << c.checkpoint_dir << "\n";
  return os.str();
}

GridPtr build_grid(const SimConfig& cfg) { return build_grid(cfg.grid); }

}  // namespace nsmhd
