#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sparsemusic/forward.hpp"
#include "sparsemusic/scene.hpp"
#include "sparsemusic/types.hpp"

namespace sparsemusic {

struct RankRule {
  enum class Kind { fixed, gap } kind = Kind::fixed;
  std::size_t s = 0;
  double tol = 1e3;  // gap rule: sigma_k / sigma_{k+1} must exceed this

  static RankRule fixed(std::size_t s) { return {Kind::fixed, s, 1e3}; }
  static RankRule gap(double tol = 1e3) { return {Kind::gap, 0, tol}; }
};

struct SpectralDecomposition {
  RVector singular_values;  // min(n, m) values, descending
  CMatrix left;             // full n x n left singular basis
  CMatrix q1;               // n x rank
  CMatrix q2;               // n x (n - rank)
  std::size_t rank = 0;
  double gap = 0.0;         // sigma_rank / sigma_{rank+1}; inf when the latter is zero
};

SpectralDecomposition decompose(const CMatrix& y, const RankRule& rule);

// J capped here; values above the cap are singularities.
inline constexpr double kImagingCap = 1e14;

struct ImagingResult {
  RVector values;            // J(r) per grid point, capped at kImagingCap
  RVector projector_norms;   // ||P phi_r||_2
  std::vector<bool> capped;
  IndexSet recovered_support;
  std::string rule = "none";
  double threshold_value = 0.0;
  bool ties_broken = false;  // top-s selection hit equal norms at the cut
};

// J(r) = ||Q2^* phi_r||^{-2} for every column of phi_ext (unit-normalized first).
ImagingResult imaging_function(const SpectralDecomposition& dec, const CMatrix& phi_ext);
ImagingResult imaging_function(const SpectralDecomposition& dec, const SensingPair& pair);

// Indices of the s largest J values (smallest projector norms), ties by index.
IndexSet top_peaks(ImagingResult& img, std::size_t s);

struct ThresholdRule {
  enum class Kind { gamma, ric, fixed } kind = Kind::fixed;
  double gamma = 0.0;        // Gamma_S (or Gamma_S(l))
  double delta_minus = 0.0;  // delta^-_{s+1}
  double delta_plus = 0.0;   // delta^+_s

  static ThresholdRule from_gamma(double g) { return {Kind::gamma, g, 0.0, 0.0}; }
  static ThresholdRule from_ric(double dm, double dp) { return {Kind::ric, 0.0, dm, dp}; }
  static ThresholdRule fixed_rule() { return {}; }
};

std::string to_string(ThresholdRule::Kind kind);
ThresholdRule::Kind threshold_kind_from_string(const std::string& name);

double threshold_value(const ThresholdRule& rule);
IndexSet threshold_support(ImagingResult& img, const ThresholdRule& rule);

struct GridlessCertificate {
  bool checked = false;          // ground truth supplied
  bool no_false_alarms = false;  // Theta within radius of the truth
  bool contains_support = false; // every true point is in Theta
  double max_distance = 0.0;     // worst distance from a Theta point to the truth
};

struct GridlessResult {
  IndexSet theta;
  GridlessCertificate certificate;
};

// Theta = {r : J(r) >= tau}; the rule's Gamma should be Gamma_S(radius).
GridlessResult gridless_support(ImagingResult& img, const Grid& grid, double radius,
                                const ThresholdRule& rule,
                                const std::optional<IndexSet>& truth = std::nullopt);

// All grid points within `radius` of a point of `support` (closed ball).
IndexSet neighborhood(const Grid& grid, const IndexSet& support, double radius);

struct AmplitudeFit {
  std::vector<cplx> amplitudes;
  double residual = 0.0;  // ||Y - Phi X Psi^*||_F
  double condition = 1.0;
};

// Least squares for diagonal X in Y = Phi X Psi^*.
AmplitudeFit invert_amplitudes(const CMatrix& y, const CMatrix& phi, const CMatrix& psi);

// CSV: x,y,z,J,in_support
void write_imaging_csv(const std::string& path, const Grid& grid, const ImagingResult& img,
                       const IndexSet& truth = {});
// 8-bit greyscale PGM of log10 J on a planar lattice.
void write_heatmap_pgm(const std::string& path, const Grid& grid, const ImagingResult& img);

}  // namespace sparsemusic
