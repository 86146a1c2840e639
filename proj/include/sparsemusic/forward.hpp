#pragma once

#include "sparsemusic/scene.hpp"
#include "sparsemusic/types.hpp"

namespace sparsemusic {

// Sampling-side (Phi) and incidence-side (Psi) sensing matrices over the whole
// grid, plus their restriction to an object support. Extended matrices always
// carry unit-norm columns; physical prefactors are recorded, never applied.
struct SensingPair {
  CMatrix phi_ext;  // n x N
  CMatrix psi_ext;  // m x N
  CMatrix phi;      // n x s
  CMatrix psi;      // m x s
  IndexSet support;
  bool normalized = true;
  // psi_ext == conj(phi_ext): sensors double as sources, so Y = Phi X Phi^T.
  bool transceiver = false;
  cplx scale = 1.0;
  RVector column_norms;  // pre-normalization column norms of phi_ext

  std::size_t n() const { return static_cast<std::size_t>(phi_ext.rows()); }
  std::size_t m() const { return static_cast<std::size_t>(psi_ext.rows()); }
  std::size_t grid_size() const { return static_cast<std::size_t>(phi_ext.cols()); }
};

// Copy of `pair` with phi/psi restricted to `support`.
SensingPair restrict_to(SensingPair pair, const IndexSet& support);
CMatrix select_columns(const CMatrix& m, const IndexSet& columns);

// Born far-field pair: Phi_{kj} = n^{-1/2} e^{-i w s_k . r_j}, Psi likewise with d_l.
SensingPair farfield_pair(const Grid& grid, const SamplingScheme& scheme);
SensingPair farfield_pair(const Grid& grid, const Scene& scene, const SamplingScheme& scheme);

// Phase factors of the paraxial kernel: Phi = diag(d1) * a * diag(d2).
struct ParaxialFactors {
  CVector d1;  // n, unit modulus
  CMatrix a;   // n x N scaled Fourier factor
  CVector d2;  // N, unit modulus
};

ParaxialFactors paraxial_factors(const Grid& grid, const SamplingScheme& scheme);
SensingPair paraxial_pair(const Grid& grid, const SamplingScheme& scheme);

// Column-normalized exact 3-D Green function e^{i w R} / (4 pi R) between
// sensors and grid points, transceiver layout.
SensingPair exact_green_pair(const Grid& grid, const SamplingScheme& scheme);

// Free-space Green function; throws DomainError for coincident points.
cplx green_function(const Vec3& a, const Vec3& b, double wavenumber);

struct FoldyLaxSystem {
  CMatrix g;               // s x s, zero diagonal
  CMatrix total_fields;    // U, s x m
  CMatrix incident_fields; // U^i, s x m
  double wavenumber = 0.0;
  double condition = 1.0;  // estimated condition number of I - w^2 G X
  double relative_residual = 0.0;
};

inline constexpr double kResonanceCondition = 1e12;

// Solves (I - w^2 G X) U = U^i with U^i = Psi_S^* taken from the Born pair, so
// that Born and multiple-scattering data share one normalization.
FoldyLaxSystem foldy_lax_solve(const Grid& grid, const Scene& scene, const SensingPair& born_pair,
                               double wavenumber);

// Y = Phi X Psi^* over the scene support (Born).
DataMatrix assemble_data(const SensingPair& pair, const Scene& scene);
// Multiple-scattering data: Psi columns replaced by the total fields.
DataMatrix assemble_data(const SensingPair& pair, const Scene& scene, const FoldyLaxSystem& fl);
// Y = Phi~ diag(x) Psi~^* for an arbitrary extended object vector.
CMatrix assemble_extended(const SensingPair& pair, const CVector& x);

// Data of a piecewise-constant (indicator-spline) planar object, deconvolved by
// the cell transform so it matches assemble_data on the Fourier pair.
struct ExtendedObjectData {
  DataMatrix data;
  CMatrix raw;            // cell-integrated entries before deconvolution
  CMatrix deconvolution;  // l^d (2 pi)^{d/2} g^(l w (d_l - s_k)) per entry
};

ExtendedObjectData extended_object_data(const Grid& grid, const Scene& scene,
                                        const SamplingScheme& scheme);

// Transform of the unit-square indicator, (2 pi)^{-1} sinc(kx/2) sinc(ky/2).
double indicator_transform(double kx, double ky);

}  // namespace sparsemusic
