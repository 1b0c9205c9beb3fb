#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "larche/experiments.hpp"
#include "larche/geometry.hpp"
#include "larche/phasefield.hpp"
#include "larche/potential.hpp"

namespace larche::cli {

/// Malformed or missing config; maps to exit status 2.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Keys shared by every config document.
struct Common {
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  int thread_count = 1;
  DoubleWell potential = DoubleWell::quartic();
  std::optional<RadialElasticParams> elasticity;
  LaplacianKind laplacian = LaplacianKind::five_point;
};

struct SimulateConfig {
  Common common;
  Grid2D grid;
  PFConfig pf;
  Shape shape;
  int order = 1;
  double delta = 0.0;  ///< 0 picks 4 eps
  int samples = 10;
  bool contours = true;
};

struct ResidualConfig {
  Common common;
  std::vector<double> epsilons;
  double L = 1.2;
  double R = 0.25;
  double nodes_per_eps = 4.0;
  double C_star = 10.0;
};

struct RatesConfig {
  Common common;
  std::vector<double> epsilons;
  CircleSetup circle;
};

struct SpectralConfig {
  Common common;
  std::vector<double> epsilons;
  int n = 64;
  double L = 0.6;
  double gamma1 = 1.0;
  std::string profile = "planar";
  double radius = 0.2;
  double amplitude = 1.0;
  double max_ratio = 2.0;
  int cross_check_starts = 0;  ///< 0 skips the descent cross-check
};

/// Reads and parses a JSON file; SchemaError if absent or not JSON.
nlohmann::json load_json(const std::filesystem::path& p);

DoubleWell parse_potential(const nlohmann::json& j);
SimulateConfig parse_simulate(const nlohmann::json& j);
ResidualConfig parse_residual(const nlohmann::json& j);
RatesConfig parse_rates(const nlohmann::json& j);
SpectralConfig parse_spectral(const nlohmann::json& j);

/// LARCHE_THREADS when set, otherwise the config value.
int resolve_threads(int configured);

}  // namespace larche::cli
