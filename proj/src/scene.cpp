#include "sparsemusic/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsemusic {

Grid Grid::planar(std::size_t side, double spacing, GridCentering centering) {
  if (side < 1) throw std::invalid_argument("planar grid: side must be >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("planar grid: spacing must be positive");
  Grid g;
  g.spacing_ = spacing;
  g.side_ = side;
  if (centering == GridCentering::centered) {
    const double shift = -0.5 * static_cast<double>(side + 1) * spacing;
    g.offset_ = Vec3(shift, shift, 0.0);
  }
  g.points_.reserve(side * side);
  for (std::size_t p1 = 1; p1 <= side; ++p1) {
    for (std::size_t p2 = 1; p2 <= side; ++p2) {
      g.points_.emplace_back(Vec3(static_cast<double>(p1) * spacing,
                                  static_cast<double>(p2) * spacing, 0.0) +
                             g.offset_);
    }
  }
  return g;
}

Grid Grid::from_points(std::vector<Vec3> points, double spacing) {
  if (points.empty()) throw std::invalid_argument("grid: no points");
  if (!(spacing > 0.0)) throw std::invalid_argument("grid: spacing must be positive");
  Grid g;
  g.spacing_ = spacing;
  g.points_ = std::move(points);
  return g;
}

std::size_t Grid::index(std::size_t p1, std::size_t p2) const {
  if (!is_planar_lattice()) throw std::logic_error("grid: not a planar lattice");
  if (p1 < 1 || p1 > side_ || p2 < 1 || p2 > side_)
    throw std::out_of_range("grid: lattice coordinate out of range");
  return (p1 - 1) * side_ + (p2 - 1);
}

std::pair<std::size_t, std::size_t> Grid::lattice_coords(std::size_t j) const {
  if (!is_planar_lattice()) throw std::logic_error("grid: not a planar lattice");
  if (j >= points_.size()) throw std::out_of_range("grid: index out of range");
  return {j / side_ + 1, j % side_ + 1};
}

Vec2 Grid::lattice_vector(std::size_t j) const {
  const Vec3& r = point(j);
  return Vec2((r.x() - offset_.x()) / spacing_, (r.y() - offset_.y()) / spacing_);
}

std::pair<Vec3, Vec3> Grid::extent() const {
  Vec3 lo = points_.front();
  Vec3 hi = points_.front();
  for (const Vec3& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

double Grid::min_pairwise_distance() const {
  if (points_.size() < 2) return std::numeric_limits<double>::infinity();
  if (is_planar_lattice()) return spacing_;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      best = std::min(best, (points_[i] - points_[j]).norm());
  return best;
}

std::optional<double> Scene::xi_min() const {
  if (amplitudes.empty()) return std::nullopt;
  double v = std::numeric_limits<double>::infinity();
  for (const cplx& a : amplitudes) v = std::min(v, std::abs(a));
  return v;
}

std::optional<double> Scene::xi_max() const {
  if (amplitudes.empty()) return std::nullopt;
  double v = 0.0;
  for (const cplx& a : amplitudes) v = std::max(v, std::abs(a));
  return v;
}

CVector Scene::extended(std::size_t n_grid) const {
  CVector x = CVector::Zero(static_cast<Eigen::Index>(n_grid));
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= n_grid) throw std::out_of_range("scene: support index outside grid");
    x(static_cast<Eigen::Index>(support[i])) = amplitudes[i];
  }
  return x;
}

IndexSet Scene::complement(std::size_t n_grid) const {
  IndexSet out;
  out.reserve(n_grid - std::min(n_grid, support.size()));
  std::size_t k = 0;
  for (std::size_t j = 0; j < n_grid; ++j) {
    if (k < support.size() && support[k] == j) {
      ++k;
      continue;
    }
    out.push_back(j);
  }
  return out;
}

Scene make_scene(const Grid& grid, IndexSet support, std::vector<cplx> amplitudes) {
  if (support.size() != amplitudes.size())
    throw std::invalid_argument("scene: support and amplitudes differ in length");
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  Scene scene;
  for (std::size_t i : order) {
    if (support[i] >= grid.size()) throw std::invalid_argument("scene: index outside grid");
    if (amplitudes[i] == cplx(0.0))
      throw std::invalid_argument("scene: amplitudes on the support must be nonzero");
    if (!scene.support.empty() && scene.support.back() == support[i])
      throw std::invalid_argument("scene: duplicate support index");
    scene.support.push_back(support[i]);
    scene.amplitudes.push_back(amplitudes[i]);
  }
  return scene;
}

Scene draw_scene(const Grid& grid, std::size_t s, const SceneOptions& options,
                 std::uint64_t seed) {
  if (s > grid.size()) throw std::invalid_argument("draw_scene: s exceeds grid size");
  if (!(options.amp_lo > 0.0) || options.amp_hi < options.amp_lo)
    throw std::invalid_argument("draw_scene: need 0 < lo <= hi");
  Rng rng(seed);
  Rng pick = rng.split(1);
  Rng amp = rng.split(2);

  // Partial Fisher-Yates: the first s slots are a uniform s-subset.
  std::vector<std::size_t> idx(grid.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + pick.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  IndexSet support(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s));
  std::sort(support.begin(), support.end());

  Scene scene;
  scene.support = std::move(support);
  scene.amplitudes.reserve(s);
  for (std::size_t i = 0; i < s; ++i) {
    const double mag = amp.uniform(options.amp_lo, options.amp_hi);
    if (options.complex_phase) {
      scene.amplitudes.push_back(std::polar(mag, amp.uniform(0.0, 2.0 * kPi)));
    } else {
      scene.amplitudes.emplace_back(mag, 0.0);
    }
  }
  return scene;
}

std::string to_string(SamplingKind kind) {
  switch (kind) {
    case SamplingKind::far_field_directions: return "far-field-directions";
    case SamplingKind::planar_fourier_directions: return "planar-fourier-directions";
    case SamplingKind::paraxial_sensors: return "paraxial-sensors";
    case SamplingKind::time_samples: return "time-samples";
  }
  return "unknown";
}

SamplingKind sampling_kind_from_string(const std::string& name) {
  for (SamplingKind k : {SamplingKind::far_field_directions,
                         SamplingKind::planar_fourier_directions,
                         SamplingKind::paraxial_sensors, SamplingKind::time_samples}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown sampling kind: " + name);
}

SphereDensity SphereDensity::tabulated(std::vector<double> inverse_cdf) {
  if (inverse_cdf.size() < 2) throw std::invalid_argument("sphere density: need >= 2 nodes");
  for (std::size_t i = 0; i < inverse_cdf.size(); ++i) {
    if (inverse_cdf[i] < 0.0 || inverse_cdf[i] > kPi)
      throw std::invalid_argument("sphere density: polar angle outside [0, pi]");
    if (i > 0 && inverse_cdf[i] < inverse_cdf[i - 1])
      throw std::invalid_argument("sphere density: inverse CDF must be nondecreasing");
  }
  return {Kind::tabulated, std::move(inverse_cdf)};
}

std::size_t SamplingScheme::n() const {
  return kind == SamplingKind::time_samples ? times.size() : sampling.size();
}

double SamplingScheme::wavelength() const {
  if (!(wavenumber > 0.0)) throw std::logic_error("sampling scheme: wavenumber not set");
  return 2.0 * kPi / wavenumber;
}

Vec3 planar_direction(const Vec2& a) {
  const double r2 = a.squaredNorm();
  if (r2 > 2.0 + 1e-15) throw std::invalid_argument("planar direction: |a|^2 > 2");
  const double inv = 1.0 / std::sqrt(2.0);
  return Vec3(a.x() * inv, a.y() * inv, std::sqrt(std::max(0.0, 2.0 - r2)) * inv);
}

namespace {

Vec2 uniform_square(Rng& rng) { return Vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)); }

Vec3 far_field_direction(Rng& rng, const SphereDensity& density) {
  switch (density.kind) {
    case SphereDensity::Kind::planar_induced:
      return planar_direction(uniform_square(rng));
    case SphereDensity::Kind::uniform_sphere: {
      const double z = rng.uniform(-1.0, 1.0);
      const double phi = rng.uniform(0.0, 2.0 * kPi);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      return Vec3(rho * std::cos(phi), rho * std::sin(phi), z);
    }
    case SphereDensity::Kind::tabulated: {
      const auto& t = density.inverse_cdf;
      const double u = rng.uniform() * static_cast<double>(t.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(u), t.size() - 2);
      const double frac = u - static_cast<double>(i);
      const double theta = t[i] + frac * (t[i + 1] - t[i]);
      const double phi = rng.uniform(0.0, 2.0 * kPi);
      return Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                  std::cos(theta));
    }
  }
  return Vec3::UnitZ();
}

}  // namespace

SamplingScheme draw_directions(std::size_t n, SamplingKind kind, std::uint64_t seed,
                               const SamplingOptions& options) {
  if (n < 1) throw std::invalid_argument("draw_directions: n must be >= 1");
  SamplingScheme scheme;
  scheme.kind = kind;
  scheme.seed = seed;
  scheme.wavenumber = options.wavenumber;
  Rng rng(seed);
  Rng sampling_rng = rng.split(1);
  Rng incident_rng = rng.split(2);
  const std::size_t m = options.incident_count;

  switch (kind) {
    case SamplingKind::planar_fourier_directions: {
      for (std::size_t k = 0; k < n; ++k) scheme.planar_params.push_back(uniform_square(sampling_rng));
      if (options.incident_same_as_sampling) {
        scheme.incident_params = scheme.planar_params;
      } else {
        for (std::size_t l = 0; l < m; ++l)
          scheme.incident_params.push_back(uniform_square(incident_rng));
      }
      for (const Vec2& a : scheme.planar_params) scheme.sampling.push_back(planar_direction(a));
      for (const Vec2& a : scheme.incident_params) scheme.incident.push_back(planar_direction(a));
      break;
    }
    case SamplingKind::far_field_directions: {
      for (std::size_t k = 0; k < n; ++k)
        scheme.sampling.push_back(far_field_direction(sampling_rng, options.density));
      if (options.incident_same_as_sampling) {
        scheme.incident = scheme.sampling;
      } else {
        for (std::size_t l = 0; l < m; ++l)
          scheme.incident.push_back(far_field_direction(incident_rng, options.density));
      }
      break;
    }
    case SamplingKind::paraxial_sensors: {
      if (!(options.z0 > 0.0)) throw std::invalid_argument("paraxial sensors: z0 must be positive");
      scheme.aperture = options.aperture;
      scheme.z0 = options.z0;
      const double half = 0.5 * options.aperture;
      for (std::size_t k = 0; k < n; ++k) {
        const double xi = sampling_rng.uniform(-half, half);
        const double eta = sampling_rng.uniform(-half, half);
        scheme.sampling.emplace_back(xi, eta, options.z0);
      }
      // Sources sit at the sensor locations (transceiver array).
      scheme.incident = scheme.sampling;
      break;
    }
    case SamplingKind::time_samples: {
      if (options.tone_count < 1) throw std::invalid_argument("time samples: tone count must be >= 1");
      scheme.tone_count = options.tone_count;
      for (std::size_t k = 0; k < n; ++k)
        scheme.times.push_back(static_cast<long>(sampling_rng.below(options.tone_count)) + 1);
      break;
    }
  }
  return scheme;
}

SamplingScheme planar_fourier_scheme(std::vector<Vec2> a, std::vector<Vec2> incident_a,
                                     double wavenumber) {
  if (a.empty()) throw std::invalid_argument("planar scheme: need at least one direction");
  SamplingScheme scheme;
  scheme.kind = SamplingKind::planar_fourier_directions;
  scheme.wavenumber = wavenumber;
  scheme.planar_params = std::move(a);
  scheme.incident_params = std::move(incident_a);
  for (const Vec2& p : scheme.planar_params) scheme.sampling.push_back(planar_direction(p));
  for (const Vec2& p : scheme.incident_params) scheme.incident.push_back(planar_direction(p));
  return scheme;
}

SamplingScheme paraxial_scheme(std::vector<Vec2> positions, double z0, double wavenumber,
                               double aperture) {
  if (positions.empty()) throw std::invalid_argument("paraxial scheme: no sensors");
  if (!(z0 > 0.0)) throw std::invalid_argument("paraxial scheme: z0 must be positive");
  SamplingScheme scheme;
  scheme.kind = SamplingKind::paraxial_sensors;
  scheme.wavenumber = wavenumber;
  scheme.z0 = z0;
  scheme.aperture = aperture;
  for (const Vec2& p : positions) scheme.sampling.emplace_back(p.x(), p.y(), z0);
  scheme.incident = scheme.sampling;
  return scheme;
}

DataMatrix::DataMatrix(CMatrix clean_data) : y(clean_data), clean(std::move(clean_data)) {}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

DataMatrix apply_noise(const DataMatrix& data, const NoiseSpec& spec, std::uint64_t seed) {
  if (spec.sigma < 0.0 || spec.epsilon < 0.0)
    throw std::invalid_argument("apply_noise: sigma and epsilon must be nonnegative");
  DataMatrix out = data;
  out.clean = data.clean.size() ? data.clean : data.y;
  const auto rows = out.clean.rows();
  const auto cols = out.clean.cols();

  CMatrix noise;
  if (spec.model == NoiseModel::explicit_matrix) {
    if (spec.explicit_noise.rows() != rows || spec.explicit_noise.cols() != cols)
      throw std::invalid_argument("apply_noise: explicit noise has wrong shape");
    noise = spec.explicit_noise;
  } else {
    noise = CMatrix::Zero(rows, cols);
    if (spec.sigma > 0.0) {
      const double y_max = out.clean.cwiseAbs().maxCoeff();
      Rng rng(seed);
      // Column-major fill keeps the draw order independent of storage tricks.
      for (Eigen::Index l = 0; l < cols; ++l) {
        for (Eigen::Index k = 0; k < rows; ++k) {
          const double e1 = rng.uniform(-1.0, 1.0);
          const double e2 = rng.uniform(-1.0, 1.0);
          noise(k, l) = spec.sigma * y_max * cplx(e1, e2);
        }
      }
    }
  }
  out.noise = noise;
  out.y = out.clean + noise;
  out.epsilon_realized = spectral_norm(noise);
  return out;
}

}  // namespace sparsemusic
