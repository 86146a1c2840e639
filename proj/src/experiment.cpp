#include "sparsemusic/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <mutex>
#include <thread>

#include "sparsemusic/analysis.hpp"

namespace sparsemusic {

std::string to_string(Method m) {
  switch (m) {
    case Method::music: return "music";
    case Method::bpdn_full_matrix: return "bpdn-full-matrix";
    case Method::bpdn_single_column: return "bpdn-single-column";
    case Method::omp: return "omp";
  }
  return "music";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::music, Method::bpdn_full_matrix, Method::bpdn_single_column, Method::omp})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected music, bpdn-full-matrix, bpdn-single-column or omp)");
}

double ExperimentConfig::wavenumber() const { return 2.0 * kPi / wavelength; }

Grid ExperimentConfig::grid() const {
  return Grid::planar(side, spacing, centered ? GridCentering::centered : GridCentering::first_quadrant);
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("config: ") + what + " must be positive");
  };
  positive(z0, "geometry.z0");
  positive(wavelength, "geometry.wavelength");
  positive(spacing, "geometry.spacing");
  positive(aperture, "geometry.aperture");
  if (side < 1) throw std::invalid_argument("config: geometry.side must be >= 1");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (n < 1) throw std::invalid_argument("config: counts.n must be >= 1");
  if (s < 1) throw std::invalid_argument("config: counts.s must be >= 1");
  if (s > side * side) throw std::invalid_argument("config: counts.s exceeds the grid size");
  if (sigma < 0.0) throw std::invalid_argument("config: sigma must be nonnegative");
  if (!(amp_lo > 0.0) || amp_hi < amp_lo) throw std::invalid_argument("config: bad amplitude range");
  if (selection != "top-s" && selection != "threshold")
    throw std::invalid_argument("config: selection must be top-s or threshold");
  if (imaging_kernel != "exact" && imaging_kernel != "paraxial")
    throw std::invalid_argument("config: imaging_kernel must be exact or paraxial");
  if (scattering != "born" && scattering != "foldy-lax")
    throw std::invalid_argument("config: scattering must be born or foldy-lax");
  if (!(target > 0.0 && target <= 1.0)) throw std::invalid_argument("config: target must lie in (0, 1]");
}

namespace {

template <typename T>
void take(const Json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  if (j.contains("geometry")) {
    const Json& g = j.at("geometry");
    take(g, "z0", c.z0);
    take(g, "wavelength", c.wavelength);
    take(g, "spacing", c.spacing);
    take(g, "side", c.side);
    take(g, "aperture", c.aperture);
    if (g.contains("centering")) c.centered = g.at("centering").get<std::string>() == "centered";
  }
  if (j.contains("counts")) {
    const Json& k = j.at("counts");
    take(k, "n", c.n);
    take(k, "s", c.s);
  }
  take(j, "trials", c.trials);
  take(j, "sigma", c.sigma);
  if (j.contains("amplitudes")) {
    take(j.at("amplitudes"), "lo", c.amp_lo);
    take(j.at("amplitudes"), "hi", c.amp_hi);
  }
  if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
  take(j, "selection", c.selection);
  if (j.contains("threshold")) c.threshold = threshold_kind_from_string(j.at("threshold").get<std::string>());
  take(j, "imaging_kernel", c.imaging_kernel);
  take(j, "scattering", c.scattering);
  take(j, "symmetrize", c.symmetrize);
  if (j.contains("bpdn")) {
    take(j.at("bpdn"), "tol", c.bpdn.tol);
    take(j.at("bpdn"), "max_iters", c.bpdn.max_iters);
    take(j.at("bpdn"), "rho", c.bpdn.rho);
    take(j.at("bpdn"), "certify", c.bpdn.certify);
  }
  if (j.contains("tail")) {
    take(j.at("tail"), "K", c.tail_k);
    take(j.at("tail"), "alpha", c.tail_alpha);
    take(j.at("tail"), "gamma", c.tail_gamma);
  }
  take(j, "seed", c.seed);
  take(j, "threads", c.threads);
  if (j.contains("sweep")) {
    take(j.at("sweep"), "axis", c.sweep_axis);
    take(j.at("sweep"), "values", c.sweep_values);
  }
  if (j.contains("recoverable")) {
    take(j.at("recoverable"), "n_list", c.n_list);
    take(j.at("recoverable"), "target", c.target);
  }
  c.validate();
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["geometry"] = {{"z0", c.z0},           {"wavelength", c.wavelength}, {"spacing", c.spacing},
                   {"side", c.side},       {"aperture", c.aperture},
                   {"centering", c.centered ? "centered" : "first-quadrant"}};
  j["counts"] = {{"n", c.n}, {"m", c.n}, {"s", c.s}, {"N", c.side * c.side}};
  j["trials"] = c.trials;
  j["sigma"] = c.sigma;
  j["amplitudes"] = {{"lo", c.amp_lo}, {"hi", c.amp_hi}};
  j["method"] = to_string(c.method);
  j["selection"] = c.selection;
  j["threshold"] = to_string(c.threshold);
  j["imaging_kernel"] = c.imaging_kernel;
  j["scattering"] = c.scattering;
  j["symmetrize"] = c.symmetrize;
  j["bpdn"] = {{"tol", c.bpdn.tol}, {"max_iters", c.bpdn.max_iters}, {"rho", c.bpdn.rho}, {"certify", c.bpdn.certify}};
  j["tail"] = {{"K", c.tail_k}, {"alpha", c.tail_alpha}, {"gamma", c.tail_gamma}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["sweep"] = {{"axis", c.sweep_axis}, {"values", c.sweep_values}};
  j["recoverable"] = {{"n_list", c.n_list}, {"target", c.target}};
  return j;
}

void apply_override(Json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override '" + assignment + "' is not of the form key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw std::invalid_argument("override '" + assignment + "' has an empty key");
    if (!node->is_object()) *node = Json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial) {
  return splitmix64(splitmix64(master ^ splitmix64(point + 0x51ED27A1ULL)) ^ (trial * 0x9E3779B97F4A7C15ULL + 1));
}

// ---- vectorized problems ----

SparseProblem full_matrix_problem(const SensingPair& pair, const CMatrix& y, const CMatrix& noise) {
  const auto n = pair.phi_ext.rows();
  const auto N = pair.phi_ext.cols();
  SparseProblem p;
  if (pair.transceiver) {
    // Y = Phi X Phi^T is symmetric: keep k <= l, off-diagonals weighted by
    // sqrt2 so the Frobenius norm is preserved.
    const Eigen::Index M = n * (n + 1) / 2;
    const double r2 = std::sqrt(2.0);
    p.matrix.resize(M, N);
    for (Eigen::Index j = 0; j < N; ++j) {
      Eigen::Index row = 0;
      for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index k = 0; k <= l; ++k)
          p.matrix(row++, j) = pair.phi_ext(k, j) * pair.phi_ext(l, j) * (k == l ? 1.0 : r2);
    }
    auto hvec = [&](const CMatrix& m) {
      const CMatrix sym = 0.5 * (m + m.transpose());
      CVector v(M);
      Eigen::Index row = 0;
      for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index k = 0; k <= l; ++k) v(row++) = sym(k, l) * (k == l ? 1.0 : r2);
      return v;
    };
    p.data = hvec(y);
    p.epsilon = noise.size() ? hvec(noise).norm() : 0.0;
  } else {
    const auto m = pair.psi_ext.rows();
    p.matrix.resize(n * m, N);
    for (Eigen::Index j = 0; j < N; ++j)
      for (Eigen::Index l = 0; l < m; ++l)
        p.matrix.col(j).segment(l * n, n) = pair.phi_ext.col(j) * std::conj(pair.psi_ext(l, j));
    p.data = Eigen::Map<const CVector>(y.data(), y.size());
    p.epsilon = noise.size() ? noise.norm() : 0.0;
  }
  for (Eigen::Index j = 0; j < N; ++j) {
    const double c = p.matrix.col(j).norm();
    if (c > 0.0) p.matrix.col(j) /= c;
  }
  return p;
}

SparseProblem single_column_problem(const SensingPair& pair, const CMatrix& y, const CMatrix& noise,
                                    std::size_t column) {
  const auto l = static_cast<Eigen::Index>(column);
  if (l >= y.cols()) throw std::invalid_argument("single_column_problem: column out of range");
  SparseProblem p;
  p.matrix = pair.phi_ext;
  for (Eigen::Index j = 0; j < p.matrix.cols(); ++j) {
    const double c = p.matrix.col(j).norm();
    if (c > 0.0) p.matrix.col(j) /= c;
  }
  p.data = y.col(l);
  p.epsilon = noise.size() ? noise.col(l).norm() : 0.0;
  return p;
}

// ---- trials ----

namespace {

SamplingScheme trial_scheme(const ExperimentConfig& c, std::uint64_t seed) {
  SamplingOptions opts;
  opts.wavenumber = c.wavenumber();
  opts.aperture = c.aperture;
  opts.z0 = c.z0;
  return draw_directions(c.n, SamplingKind::paraxial_sensors, seed, opts);
}

}  // namespace

ImagingResult music_image(const ExperimentConfig& c, const Grid& grid, const CMatrix& y,
                          const SensingPair& imaging, const IndexSet& truth) {
  const SpectralDecomposition dec = decompose(y, RankRule::fixed(c.s));
  ImagingResult img = imaging_function(dec, imaging.phi_ext);
  if (c.selection == "top-s") {
    top_peaks(img, c.s);
    return img;
  }
  ThresholdRule rule = ThresholdRule::fixed_rule();
  if (c.threshold == ThresholdRule::Kind::gamma) {
    // Oracle Gamma_S on the true support.
    rule = ThresholdRule::from_gamma(gamma_exact(imaging.phi_ext, truth).gamma);
  } else if (c.threshold == ThresholdRule::Kind::ric) {
    const BoundValue b = gamma_lower_bound_set(imaging.phi_ext, truth, Scene{truth, {}}.complement(grid.size()));
    if (b.vacuous) throw DomainError("threshold: set-restricted RIC bound is vacuous");
    rule = ThresholdRule::from_gamma(b.value);
  }
  threshold_support(img, rule);
  return img;
}

Instance simulate_instance(const ExperimentConfig& c, const Grid& grid, std::uint64_t seed) {
  Instance in;
  const Rng root(seed);
  SceneOptions so;
  so.amp_lo = c.amp_lo;
  so.amp_hi = c.amp_hi;
  in.scene = draw_scene(grid, c.s, so, root.split(1).seed());
  in.scheme = trial_scheme(c, root.split(2).seed());
  in.exact = restrict_to(exact_green_pair(grid, in.scheme), in.scene.support);
  if (c.scattering == "foldy-lax")
    in.data = assemble_data(in.exact, in.scene, foldy_lax_solve(grid, in.scene, in.exact, c.wavenumber()));
  else
    in.data = assemble_data(in.exact, in.scene);
  NoiseSpec ns;
  ns.sigma = c.sigma;
  in.data = apply_noise(in.data, ns, root.split(3).seed());
  in.imaging = c.imaging_kernel == "paraxial" ? paraxial_pair(grid, in.scheme) : in.exact;
  return in;
}

TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t seed) {
  return run_trial(config, config.grid(), seed);
}

TrialOutcome run_trial(const ExperimentConfig& c, const Grid& grid, std::uint64_t seed) {
  TrialOutcome out;
  std::string stage = "simulate";
  try {
    const Instance in = simulate_instance(c, grid, seed);
    const DataMatrix& data = in.data;
    const SensingPair* imaging = &in.imaging;
    out.truth = in.scene.support;
    out.epsilon = data.epsilon_realized;

    stage = to_string(c.method);
    const CMatrix y_sym = c.symmetrize ? CMatrix(0.5 * (data.y + data.y.transpose())) : data.y;
    switch (c.method) {
      case Method::music:
        out.recovered = music_image(c, grid, y_sym, *imaging, in.scene.support).recovered_support;
        break;
      case Method::bpdn_full_matrix:
      case Method::bpdn_single_column: {
        const SparseProblem p = c.method == Method::bpdn_full_matrix
                                    ? full_matrix_problem(*imaging, data.y, data.noise)
                                    : single_column_problem(*imaging, data.y, data.noise, 0);
        const SparseSolution sol = bpdn_solve(p, c.bpdn);
        out.iterations = sol.iterations;
        out.recovered = largest_entries(sol.z_hat, c.s);
        break;
      }
      case Method::omp: {
        const SparseProblem p = full_matrix_problem(*imaging, data.y, data.noise);
        const SparseSolution sol = omp_solve(p, c.s);
        out.iterations = sol.iterations;
        out.recovered = largest_entries(sol.z_hat, c.s);
        break;
      }
    }
    out.exact = out.recovered == out.truth;
  } catch (const std::exception& e) {
    out.exact = false;
    out.failure = stage + ": " + e.what();
  }
  return out;
}

// ---- statistics ----

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  WilsonInterval w;
  if (successes > trials) throw std::invalid_argument("wilson_interval: successes exceed trials");
  if (trials < 2) {
    w.degenerate = true;
    return w;
  }
  const double T = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / T;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / T;
  const double centre = (p + z2 / (2.0 * T)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / T + z2 / (4.0 * T * T)) / denom;
  w.lo = std::clamp(std::min(centre - half, p), 0.0, 1.0);
  w.hi = std::clamp(std::max(centre + half, p), 0.0, 1.0);
  return w;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) {
    if (const char* env = std::getenv("SPARSEMUSIC_THREADS")) threads = std::strtoul(env, nullptr, 10);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

ExperimentConfig with_axis(ExperimentConfig c, const std::string& axis, double v) {
  if (axis == "sigma") c.sigma = v;
  else if (axis == "aperture") c.aperture = v;
  else if (axis == "n") c.n = static_cast<std::size_t>(std::llround(v));
  else if (axis == "s") c.s = static_cast<std::size_t>(std::llround(v));
  else throw std::invalid_argument("unknown sweep axis '" + axis + "' (expected sigma, aperture, n or s)");
  c.validate();
  return c;
}

}  // namespace

SuccessCurve success_curve(const ExperimentConfig& config, const std::string& axis,
                           const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("success_curve: need at least two sweep points");
  SuccessCurve curve;
  curve.axis = axis;
  const Grid grid = config.grid();
  std::vector<ExperimentConfig> cfgs;
  for (double v : values) cfgs.push_back(with_axis(config, axis, v));
  const std::size_t T = config.trials;
  std::vector<char> ok(values.size() * T, 0);
  // One work item per (point, trial); counters reduced afterwards.
  parallel_for(ok.size(), config.threads, [&](std::size_t idx) {
    const std::size_t point = idx / T;
    const std::size_t trial = idx % T;
    ok[idx] = run_trial(cfgs[point], grid, trial_seed(config.seed, point, trial)).exact ? 1 : 0;
  });
  for (std::size_t p = 0; p < values.size(); ++p) {
    SuccessPoint sp;
    sp.axis = values[p];
    sp.trials = T;
    for (std::size_t t = 0; t < T; ++t) sp.successes += static_cast<std::size_t>(ok[p * T + t]);
    sp.success = static_cast<double>(sp.successes) / static_cast<double>(T);
    sp.interval = wilson_interval(sp.successes, T);
    curve.points.push_back(sp);
  }
  return curve;
}

bool sparsity_passes(const ExperimentConfig& c, std::size_t point_id, std::size_t* trials_run) {
  const Grid grid = c.grid();
  const std::size_t T = c.trials;
  const auto need = static_cast<std::size_t>(std::ceil(c.target * static_cast<double>(T) - 1e-9));
  const std::size_t allowed_failures = T - need;
  std::size_t threads = c.threads;
  if (threads == 0) {
    if (const char* env = std::getenv("SPARSEMUSIC_THREADS")) threads = std::strtoul(env, nullptr, 10);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  }
  std::size_t successes = 0, failures = 0, t = 0;
  // Batches run in parallel but are tallied in trial order, so the verdict and
  // the reported trial count do not depend on the thread count.
  while (t < T) {
    const std::size_t batch = std::min(T - t, std::max<std::size_t>(1, threads));
    std::vector<char> ok(batch, 0);
    parallel_for(batch, threads, [&](std::size_t i) {
      ok[i] = run_trial(c, grid, trial_seed(c.seed, point_id, t + i)).exact ? 1 : 0;
    });
    for (std::size_t i = 0; i < batch; ++i) {
      ++t;
      if (ok[i]) ++successes;
      else ++failures;
      if (successes >= need || failures > allowed_failures) {
        if (trials_run) *trials_run = t;
        return successes >= need;
      }
    }
  }
  if (trials_run) *trials_run = t;
  return successes >= need;
}

std::vector<SparsityPoint> recoverable_sparsity(const ExperimentConfig& config,
                                                const std::vector<std::size_t>& n_list, Method method) {
  std::vector<SparsityPoint> out;
  const std::size_t N = config.side * config.side;
  std::size_t prev = 1;
  for (std::size_t n : n_list) {
    ExperimentConfig c = config;
    c.method = method;
    c.n = n;
    SparsityPoint sp;
    sp.n = n;
    std::size_t cap = n - 1;
    if (method == Method::bpdn_full_matrix || method == Method::omp) cap = n * (n + 1) / 2 - 1;
    cap = std::min(cap, N - 1);
    if (cap < 1) {
      prev = 1;
      out.push_back(sp);
      continue;
    }
    auto passes = [&](std::size_t s) {
      c.s = s;
      std::size_t run = 0;
      // Point ids depend on (n, s) only, so every method sees the same scenes.
      const bool ok = sparsity_passes(c, n * 1000003ULL + s, &run);
      ++sp.evaluations;
      sp.trials_run += run;
      return ok;
    };
    // Bracket from the previous n's answer (s_max grows with n), then bisect.
    // The answer does not depend on the starting guess when success is
    // monotone in s; the start only saves evaluations.
    std::size_t good = 0, bad = cap + 1;
    std::size_t guess = std::clamp<std::size_t>(prev, 1, cap);
    if (passes(guess)) {
      good = guess;
      while (good < cap) {
        const std::size_t next = std::min(cap, std::max(good + 1, good + good / 2));
        if (passes(next)) good = next;
        else {
          bad = next;
          break;
        }
      }
    } else {
      bad = guess;
      while (bad > 1) {
        const std::size_t next = bad / 2;
        if (passes(next)) {
          good = next;
          break;
        }
        bad = next;
      }
    }
    while (bad - good > 1) {
      const std::size_t mid = good + (bad - good) / 2;
      if (passes(mid)) good = mid;
      else bad = mid;
    }
    sp.s_max = good;
    prev = std::max<std::size_t>(good, 1);
    out.push_back(sp);
  }
  return out;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) throw std::invalid_argument("slope: need at least two usable points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  if (!(std::abs(d) > 0.0)) throw std::invalid_argument("slope: abscissae are all equal");
  return (n * sxy - sx * sy) / d;
}

}  // namespace

double loglog_slope(const std::vector<SparsityPoint>& pts) {
  std::vector<double> x, y;
  for (const auto& p : pts)
    if (p.s_max > 0) {
      x.push_back(std::log(static_cast<double>(p.n)));
      y.push_back(std::log(static_cast<double>(p.s_max)));
    }
  return fit_slope(x, y);
}

double linear_slope(const std::vector<SparsityPoint>& pts) {
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(static_cast<double>(p.n));
    y.push_back(static_cast<double>(p.s_max));
  }
  return fit_slope(x, y);
}

// ---- export ----

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string curve_csv(const SuccessCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("export: empty result set");
  std::string out = "axis,success,lo,hi,trials\n";
  for (const auto& p : curve.points)
    out += fmt(p.axis) + "," + fmt(p.success) + "," + fmt(p.interval.lo) + "," + fmt(p.interval.hi) + "," +
           std::to_string(p.trials) + "\n";
  return out;
}

Json curve_json(const SuccessCurve& curve, const ExperimentConfig& config) {
  if (curve.points.empty()) throw std::invalid_argument("export: empty result set");
  Json j;
  j["axis"] = curve.axis;
  j["config"] = config_to_json(config);
  j["points"] = Json::array();
  for (const auto& p : curve.points)
    j["points"].push_back({{"axis", p.axis},
                           {"successes", p.successes},
                           {"trials", p.trials},
                           {"success", p.success},
                           {"lo", p.interval.lo},
                           {"hi", p.interval.hi},
                           {"degenerate", p.interval.degenerate}});
  return j;
}

std::string curve_svg(const SuccessCurve& curve, const std::string& title) {
  if (curve.points.empty()) throw std::invalid_argument("export: empty result set");
  const double W = 640, H = 400, L = 60, R = 20, Tm = 40, B = 50;
  double xmin = curve.points.front().axis, xmax = xmin;
  for (const auto& p : curve.points) {
    xmin = std::min(xmin, p.axis);
    xmax = std::max(xmax, p.axis);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  auto X = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto Y = [&](double v) { return H - B - v * (H - Tm - B); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << W - R << "\" y2=\"" << Y(0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << L << "\" y2=\"" << Y(1)
     << "\" stroke=\"black\"/>\n";
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
    os << "<text x=\"" << L - 8 << "\" y=\"" << Y(t) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t)
       << "</text>\n";
  for (const auto& p : curve.points)
    os << "<text x=\"" << X(p.axis) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << fmt(p.axis) << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << curve.axis << "</text>\n";
  for (const auto& p : curve.points)
    os << "<line x1=\"" << X(p.axis) << "\" y1=\"" << Y(p.interval.lo) << "\" x2=\"" << X(p.axis) << "\" y2=\""
       << Y(p.interval.hi) << "\" stroke=\"#999\" stroke-width=\"2\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
  for (const auto& p : curve.points) os << X(p.axis) << "," << Y(p.success) << " ";
  os << "\"/>\n";
  for (const auto& p : curve.points)
    os << "<circle cx=\"" << X(p.axis) << "\" cy=\"" << Y(p.success) << "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string sparsity_csv(const std::vector<SparsityPoint>& pts) {
  if (pts.empty()) throw std::invalid_argument("export: empty result set");
  std::string out = "n,s_max,evaluations,trials_run\n";
  for (const auto& p : pts)
    out += std::to_string(p.n) + "," + std::to_string(p.s_max) + "," + std::to_string(p.evaluations) + "," +
           std::to_string(p.trials_run) + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  Json j = config_to_json(config);
  j.erase("threads");  // thread count never changes results
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
  return os.str();
}

std::string export_curve(const SuccessCurve& curve, const ExperimentConfig& config,
                         const std::string& out_root) {
  // Render everything first so an empty result never leaves files behind.
  const std::string csv = curve_csv(curve);
  const std::string json = curve_json(curve, config).dump(2) + "\n";
  const std::string svg = curve_svg(curve, "success vs " + curve.axis + " (" + to_string(config.method) + ")");
  const std::filesystem::path dir = std::filesystem::path(out_root) / config_hash(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create results directory " + dir.string() + ": " + ec.message());
  write_text_file((dir / "curve.csv").string(), csv);
  write_text_file((dir / "curve.json").string(), json);
  write_text_file((dir / "curve.svg").string(), svg);
  return dir.string();
}

}  // namespace sparsemusic
