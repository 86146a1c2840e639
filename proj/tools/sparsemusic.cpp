// sparsemusic command line. Every subcommand loads a config, calls the library
// and writes results; no numerics here.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sparsemusic/analysis.hpp"
#include "sparsemusic/experiment.hpp"
#include "sparsemusic/io.hpp"
#include "sparsemusic/music.hpp"
#include "sparsemusic/solvers.hpp"
#include "sparsemusic/spectral.hpp"

namespace fs = std::filesystem;
using namespace sparsemusic;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "results";
  std::size_t threads = 0;
  std::string threshold;
  std::string method;
  bool quiet = false;
};

// file < overrides < flags
ExperimentConfig effective_config(const Common& o, CLI::App& app) {
  Json j = Json::object();
  if (!o.config_path.empty()) {
    if (!fs::exists(o.config_path)) throw DomainError("config file not found: " + o.config_path);
    j = read_json_file(o.config_path);
  }
  for (const auto& a : o.overrides) apply_override(j, a);
  if (app.get_option("--seed")->count()) j["seed"] = o.seed;
  if (app.get_option("--threads")->count() || std::getenv("SPARSEMUSIC_THREADS")) j["threads"] = o.threads;
  if (!o.threshold.empty()) {
    j["threshold"] = o.threshold;
    j["selection"] = "threshold";
  }
  if (!o.method.empty()) j["method"] = o.method;
  ExperimentConfig c = config_from_json(j);
  if (!o.quiet) std::cerr << "effective config: " << config_to_json(c).dump() << "\n";
  return c;
}

fs::path out_dir(const Common& o) {
  fs::create_directories(o.out);
  return fs::path(o.out);
}

Json indices(const IndexSet& s) { return Json(std::vector<std::size_t>(s.begin(), s.end())); }

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_simulate(const Common& o, CLI::App& app) {
  const ExperimentConfig c = effective_config(o, app);
  const Grid grid = c.grid();
  const Instance in = simulate_instance(c, grid, c.seed);
  const fs::path dir = out_dir(o);
  write_text_file((dir / "scene.json").string(), bundle_to_json(grid, in.scene, &in.scheme).dump(2));
  write_matrix_binary((dir / "data.bin").string(), in.data.y);
  write_matrix_binary((dir / "noise.bin").string(), in.data.noise);
  write_matrix_binary((dir / "phi.bin").string(), in.imaging.phi_ext);
  emit({{"n", in.data.y.rows()},
        {"m", in.data.y.cols()},
        {"N", grid.size()},
        {"support", indices(in.scene.support)},
        {"epsilon", in.data.epsilon_realized},
        {"out", dir.string()}});
  return 0;
}

int cmd_music(const Common& o, CLI::App& app) {
  const ExperimentConfig c = effective_config(o, app);
  const Grid grid = c.grid();
  const Instance in = simulate_instance(c, grid, c.seed);
  const CMatrix y = c.symmetrize ? CMatrix(0.5 * (in.data.y + in.data.y.transpose())) : in.data.y;
  const ImagingResult img = music_image(c, grid, y, in.imaging, in.scene.support);
  const fs::path dir = out_dir(o);
  const std::string csv = (dir / "imaging.csv").string();
  write_imaging_csv(csv, grid, img, img.recovered_support);
  if (grid.is_planar_lattice()) write_heatmap_pgm((dir / "imaging.pgm").string(), grid, img);
  emit({{"rule", img.rule},
        {"threshold", img.threshold_value},
        {"recovered", indices(img.recovered_support)},
        {"truth", indices(in.scene.support)},
        {"exact", img.recovered_support == in.scene.support},
        {"imaging_csv", csv}});
  return 0;
}

int cmd_sparse(const Common& o, CLI::App& app, const std::string& problem_path, bool omp) {
  SparseProblem p;
  std::size_t s = 0;
  Json truth;
  if (!problem_path.empty()) {
    if (!fs::exists(problem_path)) throw DomainError("problem file not found: " + problem_path);
    p = problem_from_json(read_json_file(problem_path));
    s = o.config_path.empty() ? 0 : effective_config(o, app).s;
  } else {
    const ExperimentConfig c = effective_config(o, app);
    const Grid grid = c.grid();
    const Instance in = simulate_instance(c, grid, c.seed);
    p = c.method == Method::bpdn_single_column ? single_column_problem(in.imaging, in.data.y, in.data.noise)
                                               : full_matrix_problem(in.imaging, in.data.y, in.data.noise);
    s = c.s;
    truth = indices(in.scene.support);
  }
  if (omp && s == 0) throw DomainError("omp needs a sparsity: pass --config or --set counts.s=<s>");
  const SparseSolution sol = omp ? omp_solve(p, s) : bpdn_solve(p, BpdnOptions{1e-8, 50000, 0.0, true});
  const fs::path dir = out_dir(o);
  write_text_file((dir / "solution.json").string(), solution_to_json(sol).dump(2));
  Json j = {{"objective", sol.objective},   {"residual", sol.residual},   {"iterations", sol.iterations},
            {"converged", sol.converged},   {"certified", sol.certified}, {"support", indices(sol.support)},
            {"solution", (dir / "solution.json").string()}};
  if (s > 0) j["largest"] = indices(largest_entries(sol.z_hat, s));
  if (!truth.is_null()) j["truth"] = truth;
  emit(j);
  return 0;
}

RicMethod ric_method(const std::string& name) {
  if (name == "bruteforce") return RicMethod::bruteforce;
  if (name == "coherence") return RicMethod::coherence_bound;
  if (name == "set-restricted") return RicMethod::set_restricted;
  throw DomainError("unknown RIC method: " + name);
}

int cmd_analyze(const Common& o, CLI::App& app, const std::string& matrix, const std::string& ric,
                std::size_t order) {
  const RicMethod method = ric_method(ric);
  if (!matrix.empty()) {
    if (!fs::exists(matrix)) throw DomainError("matrix file not found: " + matrix);
    const CMatrix m = read_matrix_binary(matrix);
    const CoherenceReport coh = mutual_coherence(m);
    if (order < 1) throw DomainError("--order must be at least 1");
    RicEstimate r_s, r_s1;
    if (method == RicMethod::bruteforce) {
      r_s = ric_bruteforce(m, order);
      r_s1 = ric_bruteforce(m, order + 1);
    } else if (method == RicMethod::coherence_bound) {
      r_s = ric_coherence_bound(coh, order);
      r_s1 = ric_coherence_bound(coh, order + 1);
    } else {
      throw DomainError("set-restricted constants need a support; use --config");
    }
    const BoundValue g = gamma_lower_bound(r_s, r_s1);
    Json j = {{"rows", m.rows()},
              {"cols", m.cols()},
              {"coherence", {{"mu", coh.mu}, {"i", coh.i}, {"j", coh.j}}},
              {"ric_s", ric_to_json(r_s)},
              {"ric_s1", ric_to_json(r_s1)},
              {"gamma_lower", g.value},
              {"gamma_lower_vacuous", g.vacuous},
              {"delta_margin_lower", delta_margin(std::clamp(g.value, 0.0, 1.0))},
              {"rho_star", rho_star()}};
    if (!g.vacuous) j["threshold_ric"] = threshold_value(ThresholdRule::from_ric(r_s1.delta_minus, r_s.delta_plus));
    emit(j);
    return 0;
  }
  const ExperimentConfig c = effective_config(o, app);
  const Grid grid = c.grid();
  const Instance in = simulate_instance(c, grid, c.seed);
  BudgetOptions bo;
  bo.ric = method;
  emit(budget_to_json(compute_budget(in.imaging.phi_ext, in.imaging.psi_ext, in.scene, in.data.noise, bo, &grid)));
  return 0;
}

struct SpectralArgs {
  std::size_t tones = 64, sparsity = 4, samples = 24, realizations = 1000;
  double noise = 0.0;
  std::string mode = "exact";
};

int cmd_spectral(const Common& o, const SpectralArgs& a) {
  const std::uint64_t seed = o.seed_set ? o.seed : 1;
  const SignalModel model = draw_signal_model(a.tones, a.sparsity, a.samples, seed);
  const CovarianceTriple t =
      signal_covariance(model, a.noise * a.noise, a.mode == "exact", a.realizations, seed + 1);
  const SpectralResult r = covariance_music(t, tone_matrix(model.times, a.tones), a.sparsity);
  auto tones = [](const IndexSet& s) {
    std::vector<std::size_t> v;
    for (std::size_t j : s) v.push_back(j + 1);
    return v;
  };
  emit({{"tones", tones(r.indices)},
        {"truth", tones(model.support)},
        {"exact", r.indices == model.support},
        {"rank_collapse", r.rank_collapse},
        {"mode", a.mode},
        {"seed", seed}});
  return 0;
}

int cmd_experiment(const Common& o, CLI::App& app) {
  const ExperimentConfig c = effective_config(o, app);
  if (!c.n_list.empty()) {
    const auto pts = recoverable_sparsity(c, c.n_list, c.method);
    const fs::path dir = fs::path(o.out) / config_hash(c);
    fs::create_directories(dir);
    write_text_file((dir / "sparsity.csv").string(), sparsity_csv(pts));
    write_text_file((dir / "config.json").string(), config_to_json(c).dump(2));
    std::cout << sparsity_csv(pts);
    std::cerr << "wrote " << (dir / "sparsity.csv").string() << "\n";
    return 0;
  }
  if (c.sweep_axis.empty()) throw DomainError("experiment: config has neither sweep.axis nor recoverable.n_list");
  const SuccessCurve curve = success_curve(c, c.sweep_axis, c.sweep_values);
  const std::string dir = export_curve(curve, c, o.out);
  std::cout << curve_csv(curve);
  std::cerr << "wrote " << dir << "\n";
  return 0;
}

// Optimal string alignment distance (adjacent swaps count once).
std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
    }
  return d[a.size()][b.size()];
}

void collect_names(const CLI::App* app, std::vector<std::string>& out) {
  for (const CLI::Option* opt : app->get_options()) {
    for (const auto& l : opt->get_lnames()) out.push_back("--" + l);
  }
  for (const CLI::App* sub : app->get_subcommands([](const CLI::App*) { return true; })) {
    out.push_back(sub->get_name());
    collect_names(sub, out);
  }
}

std::string suggestion(const CLI::App& app, const std::vector<std::string>& extras) {
  std::vector<std::string> names;
  collect_names(&app, names);
  std::string hint;
  for (const auto& e : extras) {
    const std::string key = e.substr(0, e.find('='));
    std::vector<std::string> best;
    std::size_t d = 3;
    for (const auto& n : names) {
      const std::size_t k = edit_distance(key, n);
      if (k < d) {
        d = k;
        best.clear();
      }
      if (k == d && std::find(best.begin(), best.end(), n) == best.end()) best.push_back(n);
    }
    if (best.empty()) continue;
    hint += "did you mean ";
    for (std::size_t i = 0; i < best.size(); ++i) hint += (i ? " or '" : "'") + best[i] + "'";
    hint += " for '" + key + "'?\n";
  }
  return hint;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparsemusic: MUSIC imaging, sparse solvers and stability analysis"};
  app.require_subcommand(1);
  Common o;
  app.add_option("--config", o.config_path, "JSON config file");
  app.add_option("--set", o.overrides, "override key=value (dotted keys, repeatable)");
  app.add_option("--seed", o.seed, "master seed (default 1, or the config's)")->each([&](const std::string&) {
    o.seed_set = true;
  });
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads (0 = hardware)")->envname("SPARSEMUSIC_THREADS");
  app.add_option("--threshold", o.threshold, "MUSIC threshold rule")
      ->check(CLI::IsMember({"gamma", "ric", "fixed"}));
  app.add_option("--method", o.method, "music | bpdn-full-matrix | bpdn-single-column | omp");
  app.add_flag("--quiet", o.quiet, "do not print the effective config");
  app.fallthrough();

  auto* simulate = app.add_subcommand("simulate", "draw a scene and write scene.json, data.bin, phi.bin");
  auto* music = app.add_subcommand("music", "MUSIC imaging; writes imaging.csv");
  auto* bpdn = app.add_subcommand("bpdn", "basis pursuit denoising");
  auto* omp = app.add_subcommand("omp", "orthogonal matching pursuit");
  auto* analyze = app.add_subcommand("analyze", "coherence, RIC and stability budget as JSON");
  auto* spectral = app.add_subcommand("spectral", "spectral estimation with covariance MUSIC");
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo sweep from a config");

  std::string bpdn_problem, omp_problem;
  bpdn->add_option("--problem", bpdn_problem, "problem JSON instead of a simulated instance");
  omp->add_option("--problem", omp_problem, "problem JSON instead of a simulated instance");

  std::string matrix, ric = "bruteforce";
  std::size_t order = 2;
  analyze->add_option("matrix", matrix, "binary matrix file");
  analyze->add_option("--ric", ric, "bruteforce | coherence | set-restricted")
      ->check(CLI::IsMember({"bruteforce", "coherence", "set-restricted"}));
  analyze->add_option("--order", order, "RIC order s");

  SpectralArgs sa;
  spectral->add_option("--tones", sa.tones, "N")->capture_default_str();
  spectral->add_option("--sparsity", sa.sparsity, "s")->capture_default_str();
  spectral->add_option("--samples", sa.samples, "n")->capture_default_str();
  spectral->add_option("--realizations", sa.realizations, "R (empirical mode)")->capture_default_str();
  spectral->add_option("--noise", sa.noise, "noise standard deviation")->capture_default_str();
  spectral->add_option("--mode", sa.mode, "exact | empirical")->check(CLI::IsMember({"exact", "empirical"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n";
    if (const auto* extras = dynamic_cast<const CLI::ExtrasError*>(&e)) {
      (void)extras;
      std::vector<std::string> rest;
      for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]).rfind("--", 0) == 0) rest.emplace_back(argv[i]);
      std::vector<std::string> names;
      collect_names(&app, names);
      std::vector<std::string> unknown;
      for (const auto& r : rest)
        if (std::find(names.begin(), names.end(), r.substr(0, r.find('='))) == names.end()) unknown.push_back(r);
      std::cerr << suggestion(app, unknown);
    }
    std::cerr << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(o, app);
    if (*music) return cmd_music(o, app);
    if (*bpdn) return cmd_sparse(o, app, bpdn_problem, false);
    if (*omp) return cmd_sparse(o, app, omp_problem, true);
    if (*analyze) return cmd_analyze(o, app, matrix, ric, order);
    if (*spectral) return cmd_spectral(o, sa);
    if (*experiment) return cmd_experiment(o, app);
  } catch (const std::exception& e) {
    const Json err = {{"error", {{"kind", dynamic_cast<const DomainError*>(&e) ? "domain" : "runtime"},
                                 {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
