#include "sparsemusic/forward.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sparsemusic {

namespace {

constexpr cplx kI(0.0, 1.0);

void require_wavenumber(const SamplingScheme& scheme, const char* who) {
  if (!(scheme.wavenumber > 0.0) || !std::isfinite(scheme.wavenumber))
    throw std::invalid_argument(std::string(who) + ": wavenumber must be positive");
}

CMatrix plane_wave_matrix(const Grid& grid, const std::vector<Vec3>& dirs, double omega) {
  const auto rows = static_cast<Eigen::Index>(dirs.size());
  const auto cols = static_cast<Eigen::Index>(grid.size());
  CMatrix out(rows, cols);
  const double norm = 1.0 / std::sqrt(static_cast<double>(rows));
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Vec3& r = grid.point(static_cast<std::size_t>(j));
    for (Eigen::Index k = 0; k < rows; ++k)
      out(k, j) = norm * std::exp(-kI * omega * dirs[static_cast<std::size_t>(k)].dot(r));
  }
  return out;
}

// int_{c - h/2}^{c + h/2} e^{i k x} dx
cplx cell_integral(double k, double center, double h) {
  if (std::abs(k * h) < 1e-8) return h * std::exp(kI * k * center);
  return (std::exp(kI * k * (center + 0.5 * h)) - std::exp(kI * k * (center - 0.5 * h))) / (kI * k);
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

CMatrix select_columns(const CMatrix& m, const IndexSet& columns) {
  CMatrix out(m.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] >= static_cast<std::size_t>(m.cols()))
      throw std::out_of_range("select_columns: index " + std::to_string(columns[i]) + " out of range");
    out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(columns[i]));
  }
  return out;
}

SensingPair restrict_to(SensingPair pair, const IndexSet& support) {
  pair.phi = select_columns(pair.phi_ext, support);
  pair.psi = select_columns(pair.psi_ext, support);
  pair.support = support;
  return pair;
}

SensingPair farfield_pair(const Grid& grid, const SamplingScheme& scheme) {
  if (scheme.kind != SamplingKind::far_field_directions &&
      scheme.kind != SamplingKind::planar_fourier_directions)
    throw std::invalid_argument("farfield_pair: scheme kind " + to_string(scheme.kind) +
                                " has no far-field directions");
  if (scheme.sampling.empty()) throw std::invalid_argument("farfield_pair: no sampling directions");
  if (scheme.incident.empty()) throw std::invalid_argument("farfield_pair: no incident directions");
  if (grid.size() == 0) throw std::invalid_argument("farfield_pair: empty grid");
  require_wavenumber(scheme, "farfield_pair");
  SensingPair pair;
  pair.phi_ext = plane_wave_matrix(grid, scheme.sampling, scheme.wavenumber);
  pair.psi_ext = plane_wave_matrix(grid, scheme.incident, scheme.wavenumber);
  pair.phi = CMatrix(pair.phi_ext.rows(), 0);
  pair.psi = CMatrix(pair.psi_ext.rows(), 0);
  pair.scale = std::sqrt(static_cast<double>(scheme.sampling.size()));
  return pair;
}

SensingPair farfield_pair(const Grid& grid, const Scene& scene, const SamplingScheme& scheme) {
  return restrict_to(farfield_pair(grid, scheme), scene.support);
}

ParaxialFactors paraxial_factors(const Grid& grid, const SamplingScheme& scheme) {
  if (scheme.kind != SamplingKind::paraxial_sensors)
    throw std::invalid_argument("paraxial_factors: scheme is not paraxial-sensors");
  if (scheme.sampling.empty()) throw std::invalid_argument("paraxial_factors: no sensors");
  require_wavenumber(scheme, "paraxial_factors");
  if (!(scheme.z0 > 0.0)) throw std::invalid_argument("paraxial_factors: z0 must be positive");
  const double w = scheme.wavenumber;
  const double z0 = scheme.z0;
  const auto n = static_cast<Eigen::Index>(scheme.sampling.size());
  const auto N = static_cast<Eigen::Index>(grid.size());
  ParaxialFactors f;
  f.d1.resize(n);
  f.d2.resize(N);
  f.a.resize(n, N);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec3& s = scheme.sampling[static_cast<std::size_t>(k)];
    f.d1(k) = std::exp(kI * w * (s.x() * s.x() + s.y() * s.y()) / (2.0 * z0));
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < N; ++j) {
    const Vec3& r = grid.point(static_cast<std::size_t>(j));
    f.d2(j) = std::exp(kI * w * (r.x() * r.x() + r.y() * r.y()) / (2.0 * z0));
    for (Eigen::Index k = 0; k < n; ++k) {
      const Vec3& s = scheme.sampling[static_cast<std::size_t>(k)];
      f.a(k, j) = norm * std::exp(-kI * w * (s.x() * r.x() + s.y() * r.y()) / z0);
    }
  }
  return f;
}

SensingPair paraxial_pair(const Grid& grid, const SamplingScheme& scheme) {
  const ParaxialFactors f = paraxial_factors(grid, scheme);
  SensingPair pair;
  pair.phi_ext = f.d1.asDiagonal() * f.a * f.d2.asDiagonal();
  pair.psi_ext = pair.phi_ext.conjugate();
  pair.phi = CMatrix(pair.phi_ext.rows(), 0);
  pair.psi = CMatrix(pair.psi_ext.rows(), 0);
  pair.transceiver = true;
  const double w = scheme.wavenumber;
  // Physical kernel = scale * normalized kernel.
  pair.scale = std::exp(kI * w * scheme.z0) / (4.0 * kPi * scheme.z0) *
               std::sqrt(static_cast<double>(scheme.sampling.size()));
  return pair;
}

cplx green_function(const Vec3& a, const Vec3& b, double wavenumber) {
  const double r = (a - b).norm();
  if (!(r > 0.0)) throw DomainError("green function: coincident points");
  return std::exp(kI * wavenumber * r) / (4.0 * kPi * r);
}

SensingPair exact_green_pair(const Grid& grid, const SamplingScheme& scheme) {
  if (scheme.sampling.empty()) throw std::invalid_argument("exact_green_pair: no sensors");
  if (scheme.kind != SamplingKind::paraxial_sensors)
    throw std::invalid_argument("exact_green_pair: needs sensor positions (paraxial-sensors)");
  require_wavenumber(scheme, "exact_green_pair");
  const auto n = static_cast<Eigen::Index>(scheme.sampling.size());
  const auto N = static_cast<Eigen::Index>(grid.size());
  SensingPair pair;
  pair.phi_ext.resize(n, N);
  pair.column_norms.resize(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index k = 0; k < n; ++k)
      pair.phi_ext(k, j) = green_function(scheme.sampling[static_cast<std::size_t>(k)],
                                          grid.point(static_cast<std::size_t>(j)), scheme.wavenumber);
    const double c = pair.phi_ext.col(j).norm();
    pair.column_norms(j) = c;
    pair.phi_ext.col(j) /= c;
  }
  pair.psi_ext = pair.phi_ext.conjugate();
  pair.phi = CMatrix(n, 0);
  pair.psi = CMatrix(n, 0);
  pair.transceiver = true;
  return pair;
}

FoldyLaxSystem foldy_lax_solve(const Grid& grid, const Scene& scene, const SensingPair& born_pair,
                               double wavenumber) {
  if (!(wavenumber > 0.0)) throw std::invalid_argument("foldy_lax_solve: wavenumber must be positive");
  if (scene.support.empty()) throw std::invalid_argument("foldy_lax_solve: empty scene");
  const auto s = static_cast<Eigen::Index>(scene.support.size());
  FoldyLaxSystem sys;
  sys.wavenumber = wavenumber;
  sys.g = CMatrix::Zero(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j)
      if (i != j)
        sys.g(i, j) = green_function(grid.point(scene.support[static_cast<std::size_t>(i)]),
                                     grid.point(scene.support[static_cast<std::size_t>(j)]), wavenumber);

  CVector xi(s);
  for (Eigen::Index j = 0; j < s; ++j) xi(j) = scene.amplitudes[static_cast<std::size_t>(j)];
  const CMatrix system =
      CMatrix::Identity(s, s) - wavenumber * wavenumber * sys.g * xi.asDiagonal();

  // Incident fields in normalized units. Per-point column scaling is undone
  // before the solve so the coupling acts on physical fields.
  CMatrix incident = select_columns(born_pair.psi_ext, scene.support).adjoint();
  RVector c = RVector::Ones(s);
  if (born_pair.column_norms.size() == static_cast<Eigen::Index>(born_pair.grid_size()))
    for (Eigen::Index j = 0; j < s; ++j) c(j) = born_pair.column_norms(static_cast<Eigen::Index>(scene.support[static_cast<std::size_t>(j)]));
  const CMatrix physical = c.asDiagonal() * incident;

  Eigen::PartialPivLU<CMatrix> lu(system);
  const double rcond = lu.rcond();
  sys.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!std::isfinite(sys.condition) || sys.condition > kResonanceCondition) {
    std::ostringstream msg;
    msg << "foldy-lax: near-resonant configuration (condition estimate " << sys.condition << ")";
    throw DomainError(msg.str());
  }
  CMatrix u = lu.solve(physical);
  u += lu.solve(physical - system * u);
  const double denom = physical.norm();
  sys.relative_residual = denom > 0.0 ? (physical - system * u).norm() / denom : 0.0;
  sys.incident_fields = incident;
  sys.total_fields = c.cwiseInverse().asDiagonal() * u;
  return sys;
}

DataMatrix assemble_data(const SensingPair& pair, const Scene& scene) {
  const CMatrix phi = select_columns(pair.phi_ext, scene.support);
  const CMatrix psi = select_columns(pair.psi_ext, scene.support);
  CVector xi(static_cast<Eigen::Index>(scene.sparsity()));
  for (std::size_t j = 0; j < scene.sparsity(); ++j) xi(static_cast<Eigen::Index>(j)) = scene.amplitudes[j];
  DataMatrix out(phi * xi.asDiagonal() * psi.adjoint());
  out.scale = pair.transceiver ? pair.scale * pair.scale : pair.scale;
  return out;
}

DataMatrix assemble_data(const SensingPair& pair, const Scene& scene, const FoldyLaxSystem& fl) {
  const CMatrix phi = select_columns(pair.phi_ext, scene.support);
  if (fl.total_fields.rows() != phi.cols())
    throw std::invalid_argument("assemble_data: Foldy-Lax system does not match the scene");
  CVector xi(static_cast<Eigen::Index>(scene.sparsity()));
  for (std::size_t j = 0; j < scene.sparsity(); ++j) xi(static_cast<Eigen::Index>(j)) = scene.amplitudes[j];
  DataMatrix out(phi * xi.asDiagonal() * fl.total_fields);
  out.scale = pair.transceiver ? pair.scale * pair.scale : pair.scale;
  return out;
}

CMatrix assemble_extended(const SensingPair& pair, const CVector& x) {
  if (x.size() != pair.phi_ext.cols())
    throw std::invalid_argument("assemble_extended: object vector length != grid size");
  return pair.phi_ext * x.asDiagonal() * pair.psi_ext.adjoint();
}

double indicator_transform(double kx, double ky) {
  return sinc(0.5 * kx) * sinc(0.5 * ky) / (2.0 * kPi);
}

ExtendedObjectData extended_object_data(const Grid& grid, const Scene& scene,
                                        const SamplingScheme& scheme) {
  if (!grid.is_planar_lattice())
    throw std::invalid_argument("extended_object_data: needs a planar lattice grid");
  if (scheme.kind != SamplingKind::far_field_directions &&
      scheme.kind != SamplingKind::planar_fourier_directions)
    throw std::invalid_argument("extended_object_data: needs far-field directions");
  if (scheme.sampling.empty() || scheme.incident.empty())
    throw std::invalid_argument("extended_object_data: need sampling and incident directions");
  require_wavenumber(scheme, "extended_object_data");
  const double w = scheme.wavenumber;
  const double h = grid.spacing();
  const auto n = static_cast<Eigen::Index>(scheme.sampling.size());
  const auto m = static_cast<Eigen::Index>(scheme.incident.size());
  ExtendedObjectData out;
  out.raw = CMatrix::Zero(n, m);
  out.deconvolution.resize(n, m);
  CMatrix y(n, m);
  const double g0 = indicator_transform(0.0, 0.0);
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Vec3 kv = w * (scheme.incident[static_cast<std::size_t>(l)] -
                           scheme.sampling[static_cast<std::size_t>(k)]);
      cplx acc = 0.0;
      for (std::size_t q = 0; q < scene.sparsity(); ++q) {
        const Vec3& r = grid.point(scene.support[q]);
        acc += scene.amplitudes[q] * cell_integral(kv.x(), r.x(), h) * cell_integral(kv.y(), r.y(), h);
      }
      out.raw(k, l) = acc;
      const double ghat = indicator_transform(h * kv.x(), h * kv.y());
      if (std::abs(ghat) < 1e-10 * g0) {
        std::ostringstream msg;
        msg << "extended object: cell transform vanishes at sampling " << k << ", incident " << l
            << "; deconvolution impossible";
        throw DomainError(msg.str());
      }
      const double c = h * h * 2.0 * kPi * ghat;
      out.deconvolution(k, l) = c;
      y(k, l) = acc / c / std::sqrt(static_cast<double>(n * m));
    }
  }
  out.data = DataMatrix(std::move(y));
  out.data.scale = std::sqrt(static_cast<double>(n * m));
  return out;
}

}  // namespace sparsemusic
