#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "sparsemusic/experiment.hpp"

using namespace sparsemusic;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.side = 21;
  c.n = 10;
  c.s = 1;
  c.trials = 5;
  return c;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("single noiseless scatterer is recovered") {
  ExperimentConfig c;
  c.n = 10;
  c.s = 1;
  for (std::uint64_t t = 0; t < 5; ++t) {
    const TrialOutcome o = run_trial(c, trial_seed(1, 0, t));
    CHECK(o.failure.empty());
    CHECK(o.exact);
    CHECK(o.epsilon == 0.0);
  }
}

TEST_CASE("s = n - 1 in the well-resolved case") {
  ExperimentConfig c;
  c.n = 20;
  c.s = 19;
  const Grid g = c.grid();
  for (std::uint64_t t = 0; t < 5; ++t) CHECK(run_trial(c, g, trial_seed(2, 0, t)).exact);
}

TEST_CASE("well-resolved noisy MUSIC succeeds") {
  ExperimentConfig c;
  c.n = 100;
  c.s = 10;
  c.sigma = 1.0;
  const Grid g = c.grid();
  int ok = 0;
  for (std::uint64_t t = 0; t < 10; ++t) ok += run_trial(c, g, trial_seed(3, 0, t)).exact;
  CHECK(ok >= 9);
}

TEST_CASE("methods see the same scene under one seed") {
  ExperimentConfig c = small_config();
  c.s = 3;
  c.sigma = 0.1;
  const Grid g = c.grid();
  const std::uint64_t seed = trial_seed(4, 7, 0);
  const TrialOutcome a = run_trial(c, g, seed);
  c.method = Method::omp;
  const TrialOutcome b = run_trial(c, g, seed);
  c.method = Method::bpdn_single_column;
  const TrialOutcome d = run_trial(c, g, seed);
  CHECK(a.truth == b.truth);
  CHECK(a.truth == d.truth);
  CHECK(a.epsilon == b.epsilon);
}

TEST_CASE("trials are reproducible") {
  ExperimentConfig c = small_config();
  c.s = 4;
  c.sigma = 0.5;
  const Grid g = c.grid();
  const TrialOutcome a = run_trial(c, g, 99), b = run_trial(c, g, 99);
  CHECK(a.recovered == b.recovered);
  CHECK(a.truth == b.truth);
  CHECK(a.epsilon == b.epsilon);
}

TEST_CASE("full-matrix problem preserves the Frobenius norm of symmetric data") {
  ExperimentConfig c = small_config();
  const Grid g = c.grid();
  SamplingOptions o;
  o.wavenumber = c.wavenumber();
  const auto sch = draw_directions(6, SamplingKind::paraxial_sensors, 5, o);
  const SensingPair pair = exact_green_pair(g, sch);
  const CMatrix x = oracle::random_complex(6, 6, 1);
  const CMatrix y = x + x.transpose();
  const SparseProblem p = full_matrix_problem(pair, y, CMatrix::Zero(6, 6));
  CHECK(p.matrix.rows() == 21);
  CHECK(p.data.norm() == doctest::Approx(y.norm()).epsilon(1e-12));
  for (Eigen::Index j = 0; j < p.matrix.cols(); j += 37) CHECK(p.matrix.col(j).norm() == doctest::Approx(1.0));
  const SparseProblem q = single_column_problem(pair, y, CMatrix::Zero(6, 6));
  CHECK(q.matrix.rows() == 6);
  CHECK(q.epsilon == 0.0);
}

TEST_CASE("Wilson intervals") {
  const WilsonInterval d = wilson_interval(1, 1);
  CHECK(d.degenerate);
  CHECK(d.lo == 0.0);
  CHECK(d.hi == 1.0);
  // Closed form at p = 1/2, T = 100.
  const WilsonInterval w = wilson_interval(50, 100);
  const double z = 1.96, T = 100.0;
  const double centre = (0.5 + z * z / (2 * T)) / (1 + z * z / T);
  const double half = z * std::sqrt(0.25 / T + z * z / (4 * T * T)) / (1 + z * z / T);
  CHECK(w.lo == doctest::Approx(centre - half));
  CHECK(w.hi == doctest::Approx(centre + half));
  for (std::size_t k : {0u, 7u, 93u, 100u}) {
    const WilsonInterval i = wilson_interval(k, 100);
    CHECK(i.lo <= k / 100.0);
    CHECK(i.hi >= k / 100.0);
  }
  // Width shrinks roughly as T^{-1/2}.
  const WilsonInterval a = wilson_interval(50, 100), b = wilson_interval(200, 400);
  CHECK((b.hi - b.lo) / (a.hi - a.lo) == doctest::Approx(0.5).epsilon(0.05));
  CHECK_THROWS(wilson_interval(3, 2));
}

TEST_CASE("one-trial curves are flagged degenerate") {
  ExperimentConfig c = small_config();
  c.trials = 1;
  const SuccessCurve curve = success_curve(c, "sigma", {0.0, 0.1});
  REQUIRE(curve.points.size() == 2);
  for (const auto& p : curve.points) {
    CHECK(p.interval.degenerate);
    CHECK(p.interval.lo == 0.0);
    CHECK(p.interval.hi == 1.0);
  }
}

TEST_CASE("curve CSV is byte identical across runs and thread counts") {
  ExperimentConfig c = small_config();
  c.s = 3;
  c.trials = 6;
  c.threads = 1;
  const std::string a = curve_csv(success_curve(c, "sigma", {0.0, 0.5}));
  c.threads = 3;
  const std::string b = curve_csv(success_curve(c, "sigma", {0.0, 0.5}));
  CHECK(a == b);
  CHECK(a.rfind("axis,success,lo,hi,trials\n", 0) == 0);
}

TEST_CASE("export") {
  const fs::path root = fs::temp_directory_path() / "sparsemusic_export_test";
  fs::remove_all(root);
  ExperimentConfig c = small_config();
  SuccessCurve empty;
  empty.axis = "sigma";
  CHECK_THROWS(export_curve(empty, c, root.string()));
  CHECK_FALSE(fs::exists(root / config_hash(c)));

  const SuccessCurve curve = success_curve(c, "sigma", {0.0, 0.2});
  const std::string dir = export_curve(curve, c, root.string());
  CHECK(fs::path(dir).filename() == config_hash(c));
  for (const char* f : {"curve.csv", "curve.json", "curve.svg"}) CHECK(fs::exists(fs::path(dir) / f));
  fs::remove_all(root);
}

TEST_CASE("config hash ignores the thread count only") {
  ExperimentConfig a = small_config(), b = small_config();
  b.threads = 8;
  CHECK(config_hash(a) == config_hash(b));
  b.sigma = 0.2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("config JSON round trip and overrides") {
  ExperimentConfig c = small_config();
  c.method = Method::bpdn_full_matrix;
  c.sigma = 0.25;
  c.n_list = {10, 15};
  Json j = config_to_json(c);
  apply_override(j, "counts.s=4");
  apply_override(j, "geometry.aperture=10");
  apply_override(j, "method=omp");
  apply_override(j, "sweep.values=[0.1,0.2]");
  const ExperimentConfig d = config_from_json(j);
  CHECK(d.s == 4);
  CHECK(d.aperture == 10.0);
  CHECK(d.method == Method::omp);
  CHECK(d.sigma == 0.25);
  CHECK(d.n_list == std::vector<std::size_t>{10, 15});
  CHECK(d.sweep_values == std::vector<double>{0.1, 0.2});
  CHECK_THROWS_AS(apply_override(j, "novalue"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(j, "a..b=1"), std::invalid_argument);
  apply_override(j, "selection=bogus");
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  CHECK_THROWS(method_from_string("music2"));
}

TEST_CASE("slope fits") {
  std::vector<SparsityPoint> pts;
  for (std::size_t n : {10u, 20u, 40u}) pts.push_back({n, n * n / 10, 0, 0});
  CHECK(loglog_slope(pts) == doctest::Approx(2.0).epsilon(1e-9));
  std::vector<SparsityPoint> lin;
  for (std::size_t n : {10u, 15u, 20u}) lin.push_back({n, n - 1, 0, 0});
  CHECK(linear_slope(lin) == doctest::Approx(1.0));
  CHECK(sparsity_csv(lin).find("n,s_max") == 0);
}

TEST_CASE("recoverable sparsity follows n - 1 for noiseless MUSIC") {
  ExperimentConfig c;
  c.trials = 20;
  const auto pts = recoverable_sparsity(c, {6, 9}, Method::music);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].s_max == 5);
  CHECK(pts[1].s_max == 8);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

}  // TEST_SUITE
