#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lifschitz/model.hpp"

namespace lifschitz {

enum class Experiment { eig, ids, laplace_spectral, laplace_mc, fit, check };
enum class GeometryKind { torus, ball, box };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

/// Default λ-grid: 0.02·2^{k/2}, k = 0..20.
std::vector<double> default_lambda_grid();

struct RunConfig {
  Experiment experiment = Experiment::check;
  int d = 1;
  double alpha = 2.0;
  /// truncation level κ; 0 disables truncation
  double kappa = 0.0;

  std::string coupling = "bernoulli";
  double p0 = 0.5;
  double level = 1.0;
  double vmax = 1.0;
  double rate = 1.0;
  std::vector<double> atom_values;
  std::vector<double> atom_probs;

  std::string profile = "indicator";
  double profile_radius = 0.25;
  double profile_inner = 0.25;
  double profile_height = 1.0;

  GeometryKind geometry = GeometryKind::torus;
  int period = 8;
  double radius = 1.0;

  std::vector<int> resolution{128};
  int embed_factor = 0;

  long n_disorder = 64;
  long n_paths = 64;
  int n_steps = 64;

  std::vector<double> t_grid{0.5, 1, 2, 4, 8, 16, 32};
  std::vector<double> lambda_grid = default_lambda_grid();
  double window_lo = 0.0;
  double window_hi = 0.0;

  std::uint64_t seed = 1;
  std::string out = "lifschitz_out";
  /// 0: LIFSCHITZ_LAB_WORKERS or hardware parallelism
  int workers = 0;

  CouplingDistribution distribution() const;
  SingleSiteProfile single_site() const;

  bool operator==(const RunConfig&) const = default;
};

/// Sectioned key = value text. Unknown keys, malformed values and violated
/// constraints raise ConfigurationError naming the key. Validation can be
/// deferred until flag overrides have been applied.
RunConfig parse_config(const std::string& text, bool check = true);
/// Applies "section.key" → value overrides on top of a config (flags win).
void apply_overrides(RunConfig& config, const std::vector<std::pair<std::string, std::string>>& overrides);
void validate(const RunConfig& config);
/// Round-trips through parse_config bit-exactly.
std::string to_ini(const RunConfig& config);

/// Every accepted "section.key".
std::vector<std::string> config_keys();

int resolve_workers(int requested);

}  // namespace lifschitz
