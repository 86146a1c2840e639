#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsemusic/rng.hpp"
#include "sparsemusic/types.hpp"

namespace sparsemusic {

enum class GridCentering { first_quadrant, centered };

// Ordered set of candidate object positions. Planar lattices keep the
// (p1, p2) <-> j bijection j = (p1 - 1) * side + p2 (1-based), stored 0-based.
class Grid {
 public:
  // side x side lattice at (p1 * spacing, p2 * spacing, 0), optionally shifted
  // by -(side + 1) / 2 * spacing so the lattice is symmetric about the origin.
  static Grid planar(std::size_t side, double spacing,
                     GridCentering centering = GridCentering::first_quadrant);
  // Arbitrary point cloud; `spacing` is the nominal minimum separation.
  static Grid from_points(std::vector<Vec3> points, double spacing);

  std::size_t size() const { return points_.size(); }
  double spacing() const { return spacing_; }
  // Lattice side length, 0 for non-lattice grids.
  std::size_t side() const { return side_; }
  bool is_planar_lattice() const { return side_ > 0; }
  const std::vector<Vec3>& points() const { return points_; }
  const Vec3& point(std::size_t j) const { return points_.at(j); }
  const Vec3& offset() const { return offset_; }

  // 1-based lattice coordinates to 0-based column index and back.
  std::size_t index(std::size_t p1, std::size_t p2) const;
  std::pair<std::size_t, std::size_t> lattice_coords(std::size_t j) const;
  // Integer lattice vector p with position = p * spacing + offset.
  Vec2 lattice_vector(std::size_t j) const;

  std::pair<Vec3, Vec3> extent() const;
  double min_pairwise_distance() const;

 private:
  double spacing_ = 0.0;
  std::size_t side_ = 0;
  Vec3 offset_ = Vec3::Zero();
  std::vector<Vec3> points_;
};

struct Scene {
  IndexSet support;               // sorted grid indices
  std::vector<cplx> amplitudes;   // aligned with support

  std::size_t sparsity() const { return support.size(); }
  std::optional<double> xi_min() const;
  std::optional<double> xi_max() const;
  // Diagonal of the extended object matrix over an N-point grid.
  CVector extended(std::size_t n_grid) const;
  // Complement of the support in {0, ..., n_grid - 1}.
  IndexSet complement(std::size_t n_grid) const;
};

// Validated construction from explicit indices and amplitudes (sorted on output).
Scene make_scene(const Grid& grid, IndexSet support, std::vector<cplx> amplitudes);

struct SceneOptions {
  double amp_lo = 1.0;
  double amp_hi = 2.0;
  // Positive real amplitudes by default; uniform random phases when set.
  bool complex_phase = false;
};

Scene draw_scene(const Grid& grid, std::size_t s, const SceneOptions& options,
                 std::uint64_t seed);

enum class SamplingKind {
  far_field_directions,
  planar_fourier_directions,
  paraxial_sensors,
  time_samples
};

std::string to_string(SamplingKind kind);
SamplingKind sampling_kind_from_string(const std::string& name);

// Density over the polar angle of far-field directions, given as an inverse
// CDF table: theta = interp(u) for u uniform on [0, 1]. Azimuth is uniform.
struct SphereDensity {
  enum class Kind { planar_induced, uniform_sphere, tabulated } kind = Kind::planar_induced;
  std::vector<double> inverse_cdf;  // polar angles at equally spaced u in [0, 1]

  static SphereDensity planar_induced() { return {}; }
  static SphereDensity uniform_sphere() { return {Kind::uniform_sphere, {}}; }
  static SphereDensity tabulated(std::vector<double> inverse_cdf);
};

struct SamplingScheme {
  SamplingKind kind = SamplingKind::planar_fourier_directions;
  std::vector<Vec3> sampling;      // directions s_k or sensor positions
  std::vector<Vec3> incident;      // directions d_l; empty when absent
  std::vector<Vec2> planar_params; // a_k in [-1,1]^2 (planar-fourier kind)
  std::vector<Vec2> incident_params;
  std::vector<long> times;         // time-samples kind
  std::size_t tone_count = 0;      // N for time samples
  double wavenumber = 0.0;         // omega, rad / length
  double aperture = 0.0;
  double z0 = 0.0;
  std::uint64_t seed = 0;

  std::size_t n() const;
  std::size_t m() const { return incident.size(); }
  double wavelength() const;
};

// s_k = (1/sqrt2) (a, sqrt(2 - |a|^2)).
Vec3 planar_direction(const Vec2& a);

struct SamplingOptions {
  std::size_t incident_count = 0;      // m; 0 = no incident set
  bool incident_same_as_sampling = false;
  double wavenumber = std::sqrt(2.0) * kPi / 10.0;
  SphereDensity density = SphereDensity::planar_induced();
  double aperture = 100.0;             // paraxial sensors
  double z0 = 10000.0;
  std::size_t tone_count = 0;          // time samples drawn from {1..N}
};

SamplingScheme draw_directions(std::size_t n, SamplingKind kind, std::uint64_t seed,
                               const SamplingOptions& options = {});

// Planar-fourier scheme from explicit parameters (no randomness).
SamplingScheme planar_fourier_scheme(std::vector<Vec2> a, std::vector<Vec2> incident_a,
                                     double wavenumber);
// Paraxial transceiver array at explicit in-plane positions.
SamplingScheme paraxial_scheme(std::vector<Vec2> positions, double z0, double wavenumber,
                               double aperture);

enum class NoiseModel { uniform_complex_relative, explicit_matrix };

struct NoiseSpec {
  double sigma = 0.0;
  double epsilon = 0.0;  // spectral-norm budget, informational
  NoiseModel model = NoiseModel::uniform_complex_relative;
  CMatrix explicit_noise;  // used by explicit_matrix
};

// Observed data Y^eps = clean + noise, with the realized spectral norm of the noise.
struct DataMatrix {
  CMatrix y;
  CMatrix clean;
  CMatrix noise;
  double epsilon_realized = 0.0;
  cplx scale = 1.0;  // physical prefactor folded out of normalized data

  DataMatrix() = default;
  explicit DataMatrix(CMatrix clean_data);
  bool has_noise() const { return noise.size() > 0; }
};

DataMatrix apply_noise(const DataMatrix& data, const NoiseSpec& spec, std::uint64_t seed);

double spectral_norm(const CMatrix& m);

}  // namespace sparsemusic
