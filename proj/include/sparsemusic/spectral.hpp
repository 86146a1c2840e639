#pragma once

#include <cstdint>
#include <vector>

#include "sparsemusic/forward.hpp"
#include "sparsemusic/music.hpp"
#include "sparsemusic/types.hpp"

namespace sparsemusic {

// Multi-tone signal y(t) = sum_j a_j e^{-2 pi i j t / N} + e(t). Tone j
// (1..N) lives in column j - 1 of every steering matrix.
struct SignalModel {
  std::size_t tones = 0;           // N
  IndexSet support;                // column indices (tone - 1)
  std::vector<double> variances;   // E|a_j|^2 on the support
  std::vector<long> times;         // t_k in {1..N}
  // All tones share one amplitude draw per realization (rank-one source covariance).
  bool correlated = false;
};

SignalModel make_signal_model(std::size_t tones, IndexSet support, std::vector<double> variances,
                              std::vector<long> times);
// Random support of size s, unit variances, n times drawn with replacement.
SignalModel draw_signal_model(std::size_t tones, std::size_t s, std::size_t n, std::uint64_t seed);

// Phi_{k,j} = n^{-1/2} e^{-2 pi i t_k (j+1) / N}
CMatrix tone_matrix(const std::vector<long>& times, std::size_t tones);

// Raw samples, n x R, with circular Gaussian amplitudes and white noise of variance sigma2.
CMatrix synthesize(const SignalModel& model, double sigma2, std::size_t realizations,
                   std::uint64_t seed);

struct CovarianceTriple {
  CMatrix r_y;
  CMatrix r_e;
  RVector r_z;              // diagonal of the source covariance over all N columns
  bool exact = true;
  std::size_t realizations = 0;

  CMatrix signal_part() const { return r_y - r_e; }
};

// R_Y = A diag(v) A^* + sigma2 I over the supplied steering columns. The
// support may repeat an index (coincident sources).
CovarianceTriple exact_covariance(const CMatrix& steering, const std::vector<std::size_t>& support,
                                  const std::vector<double>& variances, double sigma2);
// Sample covariance of R realizations; R_E = sigma2 I is assumed known.
CovarianceTriple empirical_covariance(const CMatrix& steering, const std::vector<std::size_t>& support,
                                      const std::vector<double>& variances, double sigma2,
                                      std::size_t realizations, std::uint64_t seed,
                                      bool correlated = false);

// Tone-model covariances: steering = sqrt(n) * tone_matrix (raw samples).
CovarianceTriple signal_covariance(const SignalModel& model, double sigma2, bool exact,
                                   std::size_t realizations = 0, std::uint64_t seed = 0);

struct SpectralResult {
  IndexSet indices;          // recovered columns, sorted
  ImagingResult image;
  RVector singular_values;
  bool rank_collapse = false;  // sigma_s of R_Y - R_E below 1e-10 sigma_1
};

SpectralResult covariance_music(const CovarianceTriple& triple, const CMatrix& steering, std::size_t s);

struct SourceEstimate {
  SpectralResult result;
  std::vector<Vec3> positions;
  std::vector<double> j_values;
};

SourceEstimate localize_sources(const Grid& grid, const SensingPair& pair,
                                const CovarianceTriple& triple, std::size_t s);

}  // namespace sparsemusic
