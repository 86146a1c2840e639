#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sparsemusic/forward.hpp"
#include "sparsemusic/io.hpp"
#include "sparsemusic/music.hpp"
#include "sparsemusic/scene.hpp"
#include "sparsemusic/solvers.hpp"

namespace sparsemusic {

enum class Method { music, bpdn_full_matrix, bpdn_single_column, omp };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct ExperimentConfig {
  // geometry
  double z0 = 10000.0;
  double wavelength = 0.1;
  double spacing = 10.0;
  std::size_t side = 51;  // centered: [-250, 250]^2 at spacing 10
  bool centered = true;
  double aperture = 100.0;
  // counts
  std::size_t n = 10;
  std::size_t s = 1;
  // trials and noise
  std::size_t trials = 100;
  double sigma = 0.0;
  double amp_lo = 1.0;
  double amp_hi = 2.0;
  // pipeline
  Method method = Method::music;
  std::string selection = "top-s";  // or "threshold"
  ThresholdRule::Kind threshold = ThresholdRule::Kind::fixed;
  std::string imaging_kernel = "exact";  // or "paraxial"
  std::string scattering = "born";       // or "foldy-lax"
  // Average Y with its transpose before MUSIC / full-matrix solvers; transceiver
  // data is symmetric by reciprocity, so this only removes noise.
  bool symmetrize = true;
  BpdnOptions bpdn{1e-5, 5000, 0.0, true};
  // empirical-quantile tail parameters
  double tail_k = 1.0;
  double tail_alpha = 0.05;
  double tail_gamma = 1.0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  // sweeps
  std::string sweep_axis;             // sigma | n | aperture | s
  std::vector<double> sweep_values;
  std::vector<std::size_t> n_list;    // recoverable-sparsity runs
  double target = 0.9;                // success fraction for recoverable sparsity

  double wavenumber() const;
  Grid grid() const;
  void validate() const;
};

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& c);
// "a.b=value": value parsed as JSON when possible, else taken as a string.
void apply_override(Json& j, const std::string& assignment);

struct TrialOutcome {
  bool exact = false;
  IndexSet recovered;
  IndexSet truth;
  std::string failure;     // non-empty when a stage raised
  double epsilon = 0.0;    // realized ||E||_2
  std::size_t iterations = 0;
};

// Seeds for (point, trial); scene, scheme and noise streams split from it so
// every method sees the same draws.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial);

// One simulated instance: scene, scheme, exact pair (full grid kept in phi_ext),
// the imaging pair selected by the config, and noisy data.
struct Instance {
  Scene scene;
  SamplingScheme scheme;
  SensingPair exact;
  SensingPair imaging;
  DataMatrix data;
};
Instance simulate_instance(const ExperimentConfig& config, const Grid& grid, std::uint64_t seed);

// MUSIC image with the config's selection rule applied (recovered_support set).
// The gamma and ric thresholds need the true support.
ImagingResult music_image(const ExperimentConfig& config, const Grid& grid, const CMatrix& y,
                          const SensingPair& imaging, const IndexSet& truth);

TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t seed);
TrialOutcome run_trial(const ExperimentConfig& config, const Grid& grid, std::uint64_t seed);

// Vectorized full-matrix problem: half-vectorization for transceiver pairs,
// column stacking otherwise; columns normalized to unit norm.
SparseProblem full_matrix_problem(const SensingPair& pair, const CMatrix& y, const CMatrix& noise);
SparseProblem single_column_problem(const SensingPair& pair, const CMatrix& y, const CMatrix& noise,
                                    std::size_t column = 0);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
  bool degenerate = false;  // fewer than two trials
};
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct SuccessPoint {
  double axis = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double success = 0.0;
  WilsonInterval interval;
};

struct SuccessCurve {
  std::string axis;
  std::vector<SuccessPoint> points;
};

// Thread pool over indices 0..count-1; results are placed by index.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

SuccessCurve success_curve(const ExperimentConfig& config, const std::string& axis,
                           const std::vector<double>& values);

struct SparsityPoint {
  std::size_t n = 0;
  std::size_t s_max = 0;
  std::size_t evaluations = 0;  // distinct s values tried
  std::size_t trials_run = 0;
};

// Largest s with at least target * trials successes: bracket outward from the
// previous n's answer, then bisect. Trial loops stop once the verdict is decided.
std::vector<SparsityPoint> recoverable_sparsity(const ExperimentConfig& config,
                                                const std::vector<std::size_t>& n_list, Method method);
// Success verdict for one (n, s) point with early stopping.
bool sparsity_passes(const ExperimentConfig& config, std::size_t point_id, std::size_t* trials_run = nullptr);

// Least-squares slope of log s against log n (points with s > 0).
double loglog_slope(const std::vector<SparsityPoint>& pts);
double linear_slope(const std::vector<SparsityPoint>& pts);

std::string curve_csv(const SuccessCurve& curve);
Json curve_json(const SuccessCurve& curve, const ExperimentConfig& config);
std::string curve_svg(const SuccessCurve& curve, const std::string& title);
std::string sparsity_csv(const std::vector<SparsityPoint>& pts);

std::uint64_t fnv1a64(const std::string& text);
std::string config_hash(const ExperimentConfig& config);
// Writes curve.csv, curve.json, curve.svg under out_root/<hash>; returns the directory.
std::string export_curve(const SuccessCurve& curve, const ExperimentConfig& config,
                         const std::string& out_root);

}  // namespace sparsemusic
