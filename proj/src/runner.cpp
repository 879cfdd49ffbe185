#include "lifschitz/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lifschitz/asymptotics.hpp"
#include "lifschitz/checks.hpp"
#include "lifschitz/errors.hpp"
#include "lifschitz/io.hpp"
#include "lifschitz/montecarlo.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/spectral.hpp"
#include "lifschitz/stable_kernel.hpp"

namespace lifschitz {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using io::fmt;

constexpr std::uint64_t kTorusStream = 0x746f727573ULL;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// json numbers keep full precision but stay deterministic; infinities become strings
ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  int workers;
  std::ostream& log;
  std::vector<std::string> outputs;

  void csv(const std::string& name, const io::CsvTable& table) {
    table.write(dir / name);
    outputs.push_back(name);
  }
  void text(const std::string& name, const std::string& body) {
    io::write_text(dir / name, body);
    outputs.push_back(name);
  }
};

// Disorder sample i on T_M: couplings on [0, M)^d, folded (and truncated when κ > 0).
AlloyPotential torus_potential(const RunConfig& cfg, long i) {
  auto field = sample_disorder(cfg.distribution(), LatticeBox::cube(cfg.d, 0, cfg.period),
                               derive_key({cfg.seed, kTorusStream, static_cast<std::uint64_t>(i)}));
  const auto mode = cfg.kappa > 0.0 ? PotentialMode::truncated(cfg.kappa, cfg.period) : PotentialMode::periodized(cfg.period);
  return AlloyPotential(cfg.single_site(), std::move(field), mode);
}

DiscreteOperator torus_base(const RunConfig& cfg) {
  const int n = cfg.resolution.back();
  const double size = std::pow(static_cast<double>(n), cfg.d);
  if (size > static_cast<double>(kDenseLimit))
    throw ConfigurationError("grid.N: torus grids are limited to " + std::to_string(kDenseLimit) + " nodes, N^d = " +
                             fmt(size));
  return build_torus_operator_from_samples(cfg.d, cfg.period, n, cfg.alpha,
                                           std::vector<double>(static_cast<std::size_t>(size), 0.0));
}

// Runs f(i, spectrum) for every disorder sample in index order; spectra are
// computed in parallel blocks.
void for_each_torus_spectrum(Context& ctx, const std::function<std::vector<double>(const DiscreteOperator&)>& solve,
                             const std::function<void(long, const std::vector<double>&)>& sink) {
  const auto& cfg = ctx.cfg;
  const DiscreteOperator base = torus_base(cfg);
  const auto& nodes = base.nodes();
  const long block = std::max<long>(1, 4L * ctx.workers);
  long next_report = cfg.n_disorder / 10;
  for (long start = 0; start < cfg.n_disorder; start += block) {
    const long count = std::min(block, cfg.n_disorder - start);
    std::vector<std::vector<double>> spectra(static_cast<std::size_t>(count));
    parallel_for(count, ctx.workers, [&](long j) {
      const auto pot = torus_potential(cfg, start + j);
      std::vector<double> v(nodes.size());
      for (std::size_t k = 0; k < nodes.size(); ++k) v[k] = pot(nodes[k]);
      spectra[static_cast<std::size_t>(j)] = solve(base.with_potential(std::move(v)));
    });
    for (long j = 0; j < count; ++j) sink(start + j, spectra[static_cast<std::size_t>(j)]);
    if (start + count >= next_report && next_report > 0) {
      ctx.log << "  disorder samples " << start + count << "/" << cfg.n_disorder << "\n";
      next_report += std::max<long>(1, cfg.n_disorder / 10);
    }
  }
}

SpectrumAggregator torus_aggregate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  SpectrumAggregator agg(std::pow(static_cast<double>(cfg.period), cfg.d), cfg.lambda_grid, cfg.t_grid);
  for_each_torus_spectrum(
      ctx, [](const DiscreteOperator& op) { return all_eigenvalues(op); },
      [&](long, const std::vector<double>& ev) { agg.add(ev); });
  return agg;
}

void require_torus(const RunConfig& cfg) {
  if (cfg.geometry != GeometryKind::torus)
    throw ConfigurationError("geometry.kind: experiment " + to_string(cfg.experiment) + " runs on a torus");
}

io::CsvTable ids_table(const IdsCurve& c) {
  io::CsvTable t({"lambda", "ids", "std_error", "hits"});
  for (std::size_t i = 0; i < c.lambdas.size(); ++i)
    t.row({fmt(c.lambdas[i]), fmt(c.values[i]), fmt(c.std_errors[i]), std::to_string(c.hits[i])});
  return t;
}

io::CsvTable laplace_table(const LaplaceCurve& c) {
  io::CsvTable t({"t", "laplace", "std_error"});
  for (std::size_t i = 0; i < c.ts.size(); ++i) t.row({fmt(c.ts[i]), fmt(c.values[i]), fmt(c.std_errors[i])});
  return t;
}

ordered_json curve_meta(const RunConfig& cfg, double volume, long n_disorder) {
  return {{"d", cfg.d},
          {"alpha", cfg.alpha},
          {"period", cfg.period},
          {"N", cfg.resolution.back()},
          {"volume", volume},
          {"n_disorder", n_disorder},
          {"f0", cfg.distribution().atom_at_zero()},
          {"seed", cfg.seed}};
}

void run_eig(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.geometry == GeometryKind::torus) {
    io::CsvTable table({"sample", "index", "eigenvalue", "residual"});
    const int n = cfg.resolution.back();
    const int k = static_cast<int>(std::min<double>(4.0, std::pow(n, cfg.d)));
    std::vector<std::vector<double>> residuals;
    for_each_torus_spectrum(
        ctx,
        [k](const DiscreteOperator& op) {
          const auto s = eigenvalues(op, k);
          std::vector<double> out = s.eigenvalues;
          out.insert(out.end(), s.residuals.begin(), s.residuals.end());
          return out;
        },
        [&](long i, const std::vector<double>& v) {
          const std::size_t half = v.size() / 2;
          for (std::size_t j = 0; j < half; ++j)
            table.row({std::to_string(i), std::to_string(j), fmt(v[j]), fmt(v[half + j])});
        });
    ctx.csv("eig.csv", table);
    return;
  }
  std::vector<int> schedule = cfg.resolution;
  if (schedule.size() == 1) schedule = {schedule[0], 2 * schedule[0], 4 * schedule[0]};
  const Domain dom = cfg.geometry == GeometryKind::ball ? Domain::ball(cfg.d, cfg.radius) : Domain::box(cfg.d, cfg.radius);
  if (schedule.size() != 3) throw ConfigurationError("grid.N: Richardson extrapolation needs N or N, 2N, 4N");
  io::CsvTable table({"N", "eigenvalue", "residual"});
  std::vector<RichardsonRow> rows;
  for (int n : schedule) {
    const auto s = eigenvalues(build_dirichlet_operator(dom, cfg.alpha, n, cfg.embed_factor), 1);
    rows.push_back({n, s.eigenvalues.front()});
    table.row({std::to_string(n), fmt(s.eigenvalues.front()), fmt(s.residuals.front())});
    ctx.log << "  N = " << n << "  lambda_1 = " << fmt(s.eigenvalues.front()) << "\n";
  }
  ctx.csv("eig.csv", table);
  const auto ex = richardson(rows, 1.0);
  const double unit = ex.lambda * std::pow(cfg.radius, cfg.alpha);
  io::CsvTable summary({"lambda", "error", "lambda_unit", "order"});
  summary.row({fmt(ex.lambda), fmt(ex.error), fmt(unit), fmt(ex.order)});
  ctx.csv("eig_extrapolated.csv", summary);
  ctx.log << "extrapolated lambda_1 = " << fmt(ex.lambda) << " +- " << fmt(ex.error) << "\n";
}

void run_ids(Context& ctx) {
  require_torus(ctx.cfg);
  const auto agg = torus_aggregate(ctx);
  const auto curve = agg.ids();
  ctx.csv("ids.csv", ids_table(curve));
  ctx.text("ids.json", curve_meta(ctx.cfg, curve.volume, curve.n_disorder).dump(2) + "\n");
}

void run_laplace_spectral(Context& ctx) {
  require_torus(ctx.cfg);
  const auto agg = torus_aggregate(ctx);
  const auto curve = agg.laplace();
  ctx.csv("laplace.csv", laplace_table(curve));
  ctx.text("laplace.json", curve_meta(ctx.cfg, curve.volume, curve.n_disorder).dump(2) + "\n");
}

void run_laplace_mc(Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_torus(cfg);
  PotentialLaw law;
  law.profile = cfg.single_site();
  law.dist = cfg.distribution();
  law.kappa = cfg.kappa;
  LaplaceBudget budget;
  budget.n_disorder = cfg.n_disorder;
  budget.n_paths = cfg.n_paths;
  budget.n_steps = cfg.n_steps;
  budget.seed = cfg.seed;
  budget.workers = ctx.workers;
  const StableKernel kernel(cfg.d, cfg.alpha);
  io::CsvTable table({"t", "laplace", "std_error", "n_disorder", "n_paths", "n_steps"});
  for (double t : cfg.t_grid) {
    const auto e = estimate_laplace(kernel, law, t, budget, PathGeometry::torus(cfg.period));
    table.row({fmt(t), fmt(e.mean), fmt(e.std_error), std::to_string(e.n_disorder), std::to_string(e.n_paths),
               std::to_string(e.n_steps)});
    ctx.log << "  t = " << fmt(t) << "  L = " << fmt(e.mean) << " +- " << fmt(e.std_error) << "\n";
  }
  ctx.csv("laplace_mc.csv", table);
}

void run_fit(Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_torus(cfg);
  const auto agg = torus_aggregate(ctx);
  const auto ids = agg.ids();
  const auto lap = agg.laplace();
  ctx.csv("ids.csv", ids_table(ids));
  ctx.csv("laplace.csv", laplace_table(lap));
  const double f0 = cfg.distribution().atom_at_zero();
  std::optional<Window> window;
  if (cfg.window_hi > 0.0) window = Window{cfg.window_lo, cfg.window_hi};
  const auto fit = fit_lifschitz(ids, cfg.d, cfg.alpha, f0, window);

  std::string plateau = "# lambda^(d/alpha)  g(lambda)\n";
  for (std::size_t i = 0; i < fit.lambdas.size(); ++i)
    plateau += fmt(std::pow(fit.lambdas[i], cfg.d / cfg.alpha)) + " " + fmt(fit.plateau[i]) + "\n";
  ctx.text("plateau.dat", plateau);

  ordered_json j;
  j["lifschitz"] = {{"window", {fit.window_lo, fit.window_hi}},
                    {"exponent", fit.exponent_target},
                    {"constant", number(fit.constant)},
                    {"constant_error", number(fit.constant_error)},
                    {"theory_constant", number(fit.theory_constant)},
                    {"theory_constant_volume", number(fit.theory_constant_volume)},
                    {"lambda_d", fit.lambda_d},
                    {"trend_z", number(fit.trend_z)},
                    {"trend_p", number(fit.trend_p)}};
  try {
    const auto lfit = fit_laplace_exponent(lap, cfg.d, cfg.alpha, f0);
    j["laplace"] = {{"slope", number(lfit.slope)},
                    {"slope_se", number(lfit.slope_se)},
                    {"slope_target", lfit.slope_target},
                    {"prefactor", number(lfit.prefactor)},
                    {"prefactor_se", number(lfit.prefactor_se)},
                    {"theory_prefactor", number(lfit.theory_prefactor)}};
    const auto tb = tauberian_crosscheck(fit, lfit, cfg.d, cfg.alpha);
    j["tauberian"] = {{"numeric", tb.numeric},
                      {"eigen_constant", number(tb.eigen_constant)},
                      {"converted", number(tb.converted)},
                      {"residual", number(tb.residual)},
                      {"sigma", number(tb.sigma)},
                      {"consistent", tb.consistent},
                      {"note", tb.note}};
  } catch (const InsufficientStatisticsError& e) {
    j["laplace"] = {{"error", e.what()}};
  } catch (const DomainError& e) {
    j["laplace"] = {{"error", e.what()}};
  }
  j["meta"] = curve_meta(cfg, ids.volume, ids.n_disorder);
  ctx.text("fit.json", j.dump(2) + "\n");
  ctx.log << "plateau constant = " << fmt(fit.constant) << " (printed theory value " << fmt(fit.theory_constant)
          << "), trend p = " << fmt(fit.trend_p) << "\n";
}

bool run_check(Context& ctx) {
  const auto results = invariant_suite(ctx.workers);
  io::CsvTable table({"check", "value", "reference", "tolerance", "pass"});
  bool all = true;
  for (const auto& r : results) {
    table.row({r.name, fmt(r.value), fmt(r.reference), fmt(r.tolerance), r.pass ? "1" : "0"});
    ctx.log << (r.pass ? "PASS " : "FAIL ") << r.name << "  value " << fmt(r.value) << "  reference "
            << fmt(r.reference) << "\n";
    all = all && r.pass;
  }
  // values that depend on the worker count are excluded by construction
  ctx.csv("check.csv", table);
  return all;
}

void write_manifest(const Context& ctx, const std::string& started, const std::string& status) {
  ordered_json files = ordered_json::array();
  for (const auto& name : ctx.outputs)
    files.push_back({{"file", name}, {"sha256", io::sha256_file(ctx.dir / name)},
                     {"bytes", static_cast<std::uint64_t>(fs::file_size(ctx.dir / name))}});
  ordered_json m;
  m["artifact"] = "lifschitz_lab";
  m["version"] = kArtifactVersion;
  m["experiment"] = to_string(ctx.cfg.experiment);
  m["status"] = status;
  m["config"] = to_ini(ctx.cfg);
  m["workers"] = ctx.workers;
  m["started"] = started;
  m["finished"] = utc_now();
  m["outputs"] = files;
  io::write_text(ctx.dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  try {
    validate(config);
  } catch (const ConfigurationError& e) {
    log << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  const std::string started = utc_now();
  Context ctx{config, fs::path(config.out), resolve_workers(config.workers), log, {}};
  try {
    fs::create_directories(ctx.dir);
    fs::remove(ctx.dir / "manifest.json");
  } catch (const fs::filesystem_error& e) {
    log << "usage error: run.out: " << e.what() << "\n";
    return kExitUsage;
  }
  log << "experiment " << to_string(config.experiment) << " -> " << ctx.dir.string() << " (" << ctx.workers
      << " workers)\n";
  int code = kExitOk;
  try {
    ctx.text("config.ini", to_ini(config));
    switch (config.experiment) {
      case Experiment::eig: run_eig(ctx); break;
      case Experiment::ids: run_ids(ctx); break;
      case Experiment::laplace_spectral: run_laplace_spectral(ctx); break;
      case Experiment::laplace_mc: run_laplace_mc(ctx); break;
      case Experiment::fit: run_fit(ctx); break;
      case Experiment::check:
        if (!run_check(ctx)) {
          log << "invariant suite failed\n";
          code = kExitNumeric;
        }
        break;
    }
  } catch (const ConfigurationError& e) {
    log << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  write_manifest(ctx, started, code == kExitOk ? "ok" : "failed");
  return code;
}

}  // namespace lifschitz
