// lifschitz_lab: command-line front end for the experiment runner.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lifschitz/config.hpp"
#include "lifschitz/errors.hpp"
#include "lifschitz/io.hpp"
#include "lifschitz/runner.hpp"

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct Flags {
  std::string config_path;
  std::vector<std::string> sets;
  Overrides direct;
  std::string ball_r, box_r, torus_m;
};

// options shared by every subcommand; values are kept as text so the config
// parser reports type errors against the key name
void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "INI-style configuration file");
  sub->add_option("--set", f.sets, "override any key, e.g. --set budget.n_steps=128");
  auto keyed = [&](const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&f, key](const std::string& v) { f.direct.emplace_back(key, v); },
                                          help);
  };
  keyed("--seed", "run.seed", "master seed (u64)");
  keyed("--out", "run.out", "output directory");
  keyed("--workers", "run.workers", "worker threads (default: LIFSCHITZ_LAB_WORKERS or hardware)");
  keyed("--alpha", "model.alpha", "stability index in (0, 2]");
  keyed("--d", "model.d", "dimension 1, 2 or 3");
  keyed("--kappa", "model.kappa", "coupling truncation level (0: none)");
  keyed("--coupling", "coupling.law", "bernoulli | uniform | exponential | point_masses");
  keyed("--p0", "coupling.p0", "Bernoulli mass at zero");
  keyed("--level", "coupling.level", "Bernoulli nonzero value");
  keyed("--vmax", "coupling.vmax", "uniform(0, vmax) upper end");
  keyed("--rate", "coupling.rate", "exponential rate");
  keyed("--profile", "profile.shape", "indicator | bump");
  keyed("--N", "grid.N", "resolution list, e.g. 256,512,1024");
  keyed("--embed", "grid.embed_factor", "Dirichlet embedding factor (0: free lattice kernel)");
  keyed("--n-disorder", "budget.n_disorder", "disorder samples");
  keyed("--n-paths", "budget.n_paths", "paths per disorder sample");
  keyed("--n-steps", "budget.n_steps", "bridge skeleton steps");
  keyed("--t", "curve.t", "t-grid, comma separated");
  keyed("--lambda", "curve.lambda", "lambda-grid, comma separated");
  keyed("--window-lo", "curve.window_lo", "fit window lower end");
  keyed("--window-hi", "curve.window_hi", "fit window upper end");
  sub->add_option("--ball-r", f.ball_r, "Dirichlet ball of this radius");
  sub->add_option("--box-r", f.box_r, "Dirichlet box of this half side");
  sub->add_option("--M", f.torus_m, "torus side");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lifschitz;
  CLI::App app{"Lifschitz tails of fractional random Schroedinger operators: experiment runner"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"eig", "Dirichlet ground state with Richardson extrapolation, or torus spectra"},
      {"ids", "integrated density of states on the periodized torus"},
      {"laplace-spectral", "Laplace transform of the IDS from torus spectra"},
      {"laplace-mc", "Laplace transform by Feynman-Kac bridges"},
      {"fit", "IDS + Laplace curves, Lifschitz plateau and exponent fits"},
      {"check", "invariant suite"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::string experiment;
  for (const auto* sub : app.get_subcommands()) experiment = sub->get_name();

  RunConfig cfg;
  try {
    if (!flags.config_path.empty()) cfg = parse_config(io::read_text(flags.config_path), false);
    Overrides overrides{{"run.experiment", experiment}};
    for (const auto& s : flags.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigurationError("--set: expected key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!flags.ball_r.empty()) overrides.insert(overrides.end(), {{"geometry.kind", "ball"}, {"geometry.radius", flags.ball_r}});
    if (!flags.box_r.empty()) overrides.insert(overrides.end(), {{"geometry.kind", "box"}, {"geometry.radius", flags.box_r}});
    if (!flags.torus_m.empty()) overrides.insert(overrides.end(), {{"geometry.kind", "torus"}, {"geometry.period", flags.torus_m}});
    overrides.insert(overrides.end(), flags.direct.begin(), flags.direct.end());
    apply_overrides(cfg, overrides);
    validate(cfg);
  } catch (const ConfigurationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run(cfg, std::cerr);
}
