#pragma once

#include <string>
#include <vector>

#include "types.hpp"

namespace wbesprit {

struct BenchConfig {
  SystemConfig sys;
  SceneConfig scene;
  std::vector<double> bandwidths_hz;
  GainModel gain_model = GainModel::reflection_only;
  int baseline_k_max = 64;
  int kmeans_restarts = 5;
  PairingDomain pairing_domain = PairingDomain::both;
  bool wrap_aware_distance = false;
  int trials = 200;
  int threads = 0;  // 0 = hardware concurrency
  double strictness = 10.0;
};

// Built-in three-path urban scenario (the defaults every field falls back to).
BenchConfig default_config();

BenchConfig load_config_text(const std::string& json_text);
BenchConfig load_config_file(const std::string& path);

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::vector<Method> parse_method_list(const std::string& csv);

}  // namespace wbesprit
