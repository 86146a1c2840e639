#include "sparsemusic/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sparsemusic/rng.hpp"

namespace sparsemusic {

SignalModel make_signal_model(std::size_t tones, IndexSet support, std::vector<double> variances,
                              std::vector<long> times) {
  if (tones < 1) throw std::invalid_argument("signal model: need at least one tone");
  if (times.empty()) throw std::invalid_argument("signal model: need at least one sample time");
  if (support.size() != variances.size())
    throw std::invalid_argument("signal model: one variance per support tone");
  for (std::size_t j : support)
    if (j >= tones) throw std::invalid_argument("signal model: tone index out of range");
  for (double v : variances)
    if (!(v > 0.0)) throw std::invalid_argument("signal model: variances must be positive");
  for (long t : times)
    if (t < 1 || t > static_cast<long>(tones))
      throw std::invalid_argument("signal model: sample times must lie in {1..N}");
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return support[a] < support[b]; });
  SignalModel m;
  m.tones = tones;
  for (auto i : order) {
    m.support.push_back(support[i]);
    m.variances.push_back(variances[i]);
  }
  m.times = std::move(times);
  return m;
}

SignalModel draw_signal_model(std::size_t tones, std::size_t s, std::size_t n, std::uint64_t seed) {
  if (s > tones) throw std::invalid_argument("signal model: s exceeds the tone count");
  Rng rng(seed);
  Rng pick = rng.split(1);
  std::vector<std::size_t> perm(tones);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < s; ++i) std::swap(perm[i], perm[i + pick.below(tones - i)]);
  IndexSet support(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(s));
  SamplingOptions opts;
  opts.tone_count = tones;
  const SamplingScheme sch = draw_directions(n, SamplingKind::time_samples, rng.split(2).seed(), opts);
  return make_signal_model(tones, support, std::vector<double>(s, 1.0), sch.times);
}

CMatrix tone_matrix(const std::vector<long>& times, std::size_t tones) {
  const auto n = static_cast<Eigen::Index>(times.size());
  CMatrix out(n, static_cast<Eigen::Index>(tones));
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(tones); ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // Reduce t * tone mod N before scaling to keep the phase exact.
      const long prod = (times[static_cast<std::size_t>(k)] * (j + 1)) % static_cast<long>(tones);
      const double phase = -2.0 * kPi * static_cast<double>(prod) / static_cast<double>(tones);
      out(k, j) = norm * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return out;
}

namespace {

CMatrix raw_steering(const SignalModel& model) {
  return tone_matrix(model.times, model.tones) * std::sqrt(static_cast<double>(model.times.size()));
}

// Columns of `steering` for each support entry times the amplitude draws.
CMatrix draw_samples(const CMatrix& steering, const std::vector<std::size_t>& support,
                     const std::vector<double>& variances, double sigma2, std::size_t realizations,
                     std::uint64_t seed, bool correlated) {
  const auto n = steering.rows();
  const auto R = static_cast<Eigen::Index>(realizations);
  CMatrix samples = CMatrix::Zero(n, R);
  Rng rng(seed);
  Rng amp_rng = rng.split(1);
  Rng noise_rng = rng.split(2);
  for (Eigen::Index r = 0; r < R; ++r) {
    const cplx shared = amp_rng.complex_normal(1.0);
    for (std::size_t q = 0; q < support.size(); ++q) {
      const cplx a = correlated ? shared * std::sqrt(variances[q]) : amp_rng.complex_normal(variances[q]);
      samples.col(r) += a * steering.col(static_cast<Eigen::Index>(support[q]));
    }
    if (sigma2 > 0.0)
      for (Eigen::Index k = 0; k < n; ++k) samples(k, r) += noise_rng.complex_normal(sigma2);
  }
  return samples;
}

}  // namespace

CMatrix synthesize(const SignalModel& model, double sigma2, std::size_t realizations,
                   std::uint64_t seed) {
  if (realizations < 1) throw std::invalid_argument("synthesize: need at least one realization");
  if (sigma2 < 0.0) throw std::invalid_argument("synthesize: noise variance must be nonnegative");
  return draw_samples(raw_steering(model), model.support, model.variances, sigma2, realizations, seed,
                      model.correlated);
}

CovarianceTriple exact_covariance(const CMatrix& steering, const std::vector<std::size_t>& support,
                                  const std::vector<double>& variances, double sigma2) {
  if (support.size() != variances.size())
    throw std::invalid_argument("covariance: one variance per support entry");
  const auto n = steering.rows();
  CovarianceTriple t;
  t.exact = true;
  t.r_z = RVector::Zero(steering.cols());
  CMatrix signal = CMatrix::Zero(n, n);
  for (std::size_t q = 0; q < support.size(); ++q) {
    const auto j = static_cast<Eigen::Index>(support[q]);
    signal += variances[q] * steering.col(j) * steering.col(j).adjoint();
    t.r_z(j) += variances[q];
  }
  t.r_e = sigma2 * CMatrix::Identity(n, n);
  t.r_y = signal + t.r_e;
  return t;
}

CovarianceTriple empirical_covariance(const CMatrix& steering, const std::vector<std::size_t>& support,
                                      const std::vector<double>& variances, double sigma2,
                                      std::size_t realizations, std::uint64_t seed, bool correlated) {
  if (realizations < 1) throw std::invalid_argument("covariance: need at least one realization");
  const CMatrix samples = draw_samples(steering, support, variances, sigma2, realizations, seed, correlated);
  const auto n = steering.rows();
  CovarianceTriple t;
  t.exact = false;
  t.realizations = realizations;
  t.r_z = RVector::Zero(steering.cols());
  for (std::size_t q = 0; q < support.size(); ++q) t.r_z(static_cast<Eigen::Index>(support[q])) += variances[q];
  t.r_y = samples * samples.adjoint() / static_cast<double>(realizations);
  t.r_e = sigma2 * CMatrix::Identity(n, n);
  return t;
}

CovarianceTriple signal_covariance(const SignalModel& model, double sigma2, bool exact,
                                   std::size_t realizations, std::uint64_t seed) {
  const CMatrix a = raw_steering(model);
  if (exact) {
    if (model.correlated) {
      // Fully correlated amplitudes: R_Z = v^{1/2} v^{1/2 T}.
      CovarianceTriple t = exact_covariance(a, {}, {}, sigma2);
      CVector g = CVector::Zero(a.rows());
      for (std::size_t q = 0; q < model.support.size(); ++q)
        g += std::sqrt(model.variances[q]) * a.col(static_cast<Eigen::Index>(model.support[q]));
      t.r_y += g * g.adjoint();
      for (std::size_t q = 0; q < model.support.size(); ++q)
        t.r_z(static_cast<Eigen::Index>(model.support[q])) = model.variances[q];
      return t;
    }
    return exact_covariance(a, model.support, model.variances, sigma2);
  }
  return empirical_covariance(a, model.support, model.variances, sigma2, realizations, seed,
                              model.correlated);
}

SpectralResult covariance_music(const CovarianceTriple& triple, const CMatrix& steering, std::size_t s) {
  if (triple.r_y.rows() != steering.rows())
    throw std::invalid_argument("covariance_music: covariance and steering sizes differ");
  if (s < 1 || static_cast<Eigen::Index>(s) >= steering.rows())
    throw std::invalid_argument("covariance_music: need 1 <= s < n");
  SpectralResult res;
  const CMatrix by = triple.signal_part();
  const SpectralDecomposition dec = decompose(by, RankRule::fixed(s));
  res.singular_values = dec.singular_values;
  const double top = dec.singular_values(0);
  res.rank_collapse = !(dec.singular_values(static_cast<Eigen::Index>(s) - 1) > 1e-10 * top);
  res.image = imaging_function(dec, steering);
  res.indices = top_peaks(res.image, s);
  return res;
}

SourceEstimate localize_sources(const Grid& grid, const SensingPair& pair,
                                const CovarianceTriple& triple, std::size_t s) {
  if (pair.phi_ext.cols() != static_cast<Eigen::Index>(grid.size()))
    throw std::invalid_argument("localize_sources: sensing pair does not match the grid");
  SourceEstimate est;
  est.result = covariance_music(triple, pair.phi_ext, s);
  for (std::size_t j : est.result.indices) {
    est.positions.push_back(grid.point(j));
    est.j_values.push_back(est.result.image.values(static_cast<Eigen::Index>(j)));
  }
  return est;
}

}  // namespace sparsemusic
