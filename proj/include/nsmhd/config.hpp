#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsmhd/geometry.hpp"

namespace nsmhd {

enum class Variant { viscous, ideal };

/// Everything a single run needs. Text form: one `key = value` per line,
/// `#` starts a comment. See docs/config_format.md for the key list.
struct SimConfig {
  double epsilon = 1e-2;
  double zeta_v = 0.0;
  double zeta_H = 0.0;
  double dt = 1e-3;
  double t_end = 1.0;
  GridSpec grid;
  std::string ic_name = "random-smooth";
  std::map<std::string, double> ic_params;
  Variant variant = Variant::viscous;

  int record_every = 1;   ///< steps between diagnostic samples
  int norm_every = 0;     ///< samples between N_m evaluations (0: never)
  int norm_order = 2;     ///< m in N_m
  std::vector<double> checkpoint_times;
  std::string checkpoint_dir;

  double ic_param(const std::string& key, double fallback) const {
    auto it = ic_params.find(key);
    return it == ic_params.end() ? fallback : it->second;
  }
};

/// Throws ConfigError naming the offending field.
void validate(const SimConfig& cfg);

SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
std::string to_text(const SimConfig& cfg);

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

GridPtr build_grid(const SimConfig& cfg);

}  // namespace nsmhd
