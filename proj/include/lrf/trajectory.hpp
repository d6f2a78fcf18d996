#pragma once

#include <map>
#include <string>
#include <vector>

#include "lrf/matrixkit.hpp"

namespace lrf {

enum class Representation { X_FLOW, Z_FLOW, P_LIFTED, P_BLOCKS, H_CASCADE, H_EXPANDED };

std::string to_string(Representation rep);
Representation representation_from_string(const std::string& name);

struct IntegratorConfig {
  double step = 1e-3;
  double t_end = 20.0;
  int record_every = 100;
  bool symmetrize = true;
};

// Time-stamped flattened states plus optional named metric series.
struct Trajectory {
  Representation rep = Representation::P_BLOCKS;
  std::vector<double> times;
  std::vector<Vector> states;
  std::map<std::string, std::vector<double>> metrics;
};

}  // namespace lrf
