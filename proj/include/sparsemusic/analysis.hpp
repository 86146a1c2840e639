#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsemusic/scene.hpp"
#include "sparsemusic/types.hpp"

namespace sparsemusic {

struct CoherenceReport {
  double mu = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
};

CoherenceReport mutual_coherence(const CMatrix& m);

enum class RicMethod { bruteforce, coherence_bound, set_restricted };
std::string to_string(RicMethod method);

struct RicEstimate {
  std::size_t order = 0;
  double delta_minus = 0.0;  // clamped to [0, 1]
  double delta_plus = 0.0;
  RicMethod method = RicMethod::bruteforce;
  IndexSet witness_minus;
  IndexSet witness_plus;
};

inline constexpr std::uint64_t kRicEnumerationCap = 2000000;

// Saturating binomial coefficient.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Worst case over every r-column subset; throws std::length_error above the cap.
RicEstimate ric_bruteforce(const CMatrix& m, std::size_t r,
                           std::uint64_t cap = kRicEnumerationCap);
// delta^{+-}_r <= mu (r - 1).
RicEstimate ric_coherence_bound(const CoherenceReport& report, std::size_t r);
// Constants of one column set T.
RicEstimate ric_set_restricted(const CMatrix& m, const IndexSet& set);
// Set-restricted constants of `count` uniformly drawn r-subsets.
std::vector<RicEstimate> ric_random_subsets(const CMatrix& m, std::size_t r, std::size_t count,
                                            std::uint64_t seed);

struct GammaReport {
  double gamma = 1.0;
  std::size_t argmin = 0;
  bool empty_complement = false;  // no candidate points; gamma left at 1
};

// min over candidates r of ||(I - Q Q^*) phi_r|| / ||phi_r||, Q an orthonormal
// basis of range(phi_ext restricted to S).
GammaReport gamma_over(const CMatrix& phi_ext, const IndexSet& support, const IndexSet& candidates);
GammaReport gamma_exact(const CMatrix& phi_ext, const IndexSet& support);
// Gamma_S(l): candidates restricted to grid points farther than `radius` from S.
GammaReport gamma_exact(const CMatrix& phi_ext, const IndexSet& support, const Grid& grid,
                        double radius);

struct BoundValue {
  double value = 0.0;
  bool vacuous = false;
};

// delta^-(1 + delta^+) / (2 + delta^+ - delta^-)
double ric_quotient(double delta_minus, double delta_plus);
BoundValue gamma_lower_bound(double delta_minus_s1, double delta_plus_s);
BoundValue gamma_lower_bound(const RicEstimate& ric_s, const RicEstimate& ric_s1);
// Set-restricted variant: max over S' = S + {r}, r in candidates.
BoundValue gamma_lower_bound_set(const CMatrix& phi_ext, const IndexSet& support,
                                 const IndexSet& candidates);

double delta_margin(double gamma);
// Real root of 1 - 8 rho + 20 rho^2 - 20 rho^3.
double rho_star();
double rho_polynomial(double rho);

enum class BoundCase { general, scattering };

// ||E||^2 + 2 zeta_max sqrt(1 + d+) ||E||, or ||E||^2 + 2 xi_max (1 + d+) ||E||.
double error_term_bound(double epsilon, double delta_plus, double amp_max, BoundCase c);
// (1 - d-) zeta_min^2, or (1 - d-)^2 xi_min^2.
BoundValue sigma_min_bound(double delta_minus, double amp_min, BoundCase c);

enum class NsrCase { nor, nsr, half_ric };
std::string to_string(NsrCase c);

struct NsrCheck {
  double bound = 0.0;
  double measured = 0.0;  // epsilon / (zeta_min or xi_min)
  bool satisfied = false;
};

// dynamic_range = max/min amplitude (zeta or xi); delta_minus is delta^-_s.
double nsr_bound(NsrCase c, double dynamic_range, double delta_margin_value, double delta_minus,
                 double delta_plus);
NsrCheck nsr_admissible(NsrCase c, double epsilon, double amp_min, double amp_max,
                        double delta_margin_value, double delta_minus = 0.0,
                        double delta_plus = 0.0);

// Error matrix of the squared data: Y^e Y^e* - Y Y*.
CMatrix squared_error_term(const CMatrix& y, const CMatrix& e);

struct PerturbationReport {
  double e11 = 0.0, e12 = 0.0, e21 = 0.0, e22 = 0.0;
  double e_norm = 0.0;        // ||E_cal||_2
  double sigma_min = 0.0;     // s-th singular value of Y Y^*
  double rho = 0.0;
  double condition_205 = 0.0; // left side of (205); < 1/2 required
  bool condition_205_met = false;
  bool below_rho_star = false;
  double f_norm = 0.0;
  double f_bound = 0.0;
  double gap_metric = 0.0;          // sin of the largest principal angle
  double subspace_distance = 0.0;   // min over rotations ||Q2e U - Q2|| = 2 sin(theta/2)
  double basis_distance = 0.0;      // ||Q2e - Q2|| in the F-parametrized basis
  double distance_bound = 0.0;      // 2 rho (1 - rho) / (1 - 2 rho)^2
  double signal_min = 0.0;          // s-th singular value of the perturbed squared data
  double noise_max = 0.0;           // (s+1)-th
  double separation_lower = 0.0;    // lower bound on signal_min
  double separation_upper = 0.0;    // upper bound on noise_max
  bool bounds_hold = true;          // only meaningful when the conditions hold
};

PerturbationReport perturbation_check(const CMatrix& y, const CMatrix& e, std::size_t s);

// Principal-angle helpers between equal-dimension orthonormal bases.
RVector principal_angle_sines(const CMatrix& a, const CMatrix& b);

struct BoundEntry {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

struct StabilityBudget {
  std::size_t s = 0;
  double gamma = 0.0;
  double gamma_ell = -1.0;  // negative when not requested
  double gamma_lower = 0.0;
  bool gamma_lower_vacuous = false;
  double delta_margin = 0.0;
  double delta_margin_lower = 0.0;  // Delta evaluated at the RIC lower bound
  double delta_margin_ell = -1.0;
  double rho = 0.0;
  double rho_star = 0.0;
  double sigma_min = 0.0;
  double sigma_min_bound_general = 0.0;
  double sigma_min_bound_scattering = 0.0;
  double e_norm = 0.0;
  double error_bound_general = 0.0;
  double error_bound_scattering = 0.0;
  double zeta_min = 0.0, zeta_max = 0.0;
  double xi_min = 0.0, xi_max = 0.0;
  double epsilon = 0.0;
  double dynamic_range = 1.0;
  RicEstimate ric_s;   // max over Phi and Psi
  RicEstimate ric_s1;
  NsrCheck nor;
  NsrCheck nsr;
  double threshold_gamma = 0.0;
  double threshold_ric = 0.0;
  double threshold_fixed = 128.0 / 25.0;
  std::vector<BoundEntry> entries;
};

struct BudgetOptions {
  RicMethod ric = RicMethod::bruteforce;
  std::uint64_t cap = kRicEnumerationCap;
  double radius = -1.0;  // Gamma_S(l) when positive
};

// Full budget for data Y^e = Phi_S X Psi_S^* + E on the grid of phi_ext.
StabilityBudget compute_budget(const CMatrix& phi_ext, const CMatrix& psi_ext, const Scene& scene,
                               const CMatrix& noise, const BudgetOptions& options = {},
                               const Grid* grid = nullptr);

}  // namespace sparsemusic
