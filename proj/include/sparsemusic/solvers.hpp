#pragma once

#include <string>

#include "sparsemusic/types.hpp"

namespace sparsemusic {

struct SparseProblem {
  CMatrix matrix;  // n x N, unit columns
  CVector data;    // n
  double epsilon = 0.0;
};

struct SparseSolution {
  CVector z_hat;
  double objective = 0.0;  // ||z_hat||_1
  double residual = 0.0;   // ||data - matrix z_hat||_2
  std::size_t iterations = 0;
  bool converged = false;
  IndexSet support;        // entries above the reporting floor
  bool tie = false;        // OMP: a selection step had equal correlations
  bool certified = false;  // BP: optimality proven by a dual certificate
};

struct BpdnOptions {
  double tol = 1e-8;
  std::size_t max_iters = 50000;
  double rho = 0.0;  // initial penalty; 0 picks one from the data scale
  // epsilon = 0: every 25 iterations try to finish exactly via a dual certificate.
  bool certify = true;
};

// Reporting floor relative to ||z_hat||_inf.
inline constexpr double kSupportFloor = 1e-6;

// min ||z||_1 subject to ||data - matrix z||_2 <= epsilon, by ADMM with
// residual-balanced penalty. The returned iterate is feasible to 1e-12 relative.
SparseSolution bpdn_solve(const SparseProblem& p, const BpdnOptions& opts = {});

// s greedy steps (or stop once the residual is within epsilon).
SparseSolution omp_solve(const SparseProblem& p, std::size_t s);

IndexSet support_above_floor(const CVector& z, double rel_floor = kSupportFloor);
// Indices of the s largest magnitudes, ties by index, sorted.
IndexSet largest_entries(const CVector& z, std::size_t s);
// Best s-term approximation Z^{(s)}.
CVector best_s_term(const CVector& z, std::size_t s);

struct BpdnConstants {
  double condition_value = 0.0;  // (sqrt2/2) d+ + (sqrt2/2 + 1) d-
  bool condition_met = false;
  double c1 = 0.0;
  double c2 = 0.0;
};

BpdnConstants bpdn_error_constants(double delta_minus_2s, double delta_plus_2s);

struct BpdnBoundReport {
  double error = 0.0;
  double sparse_term = 0.0;  // C1 s^{-1/2} ||Z - Z^(s)||_1
  double noise_term = 0.0;   // C2 eps
  double bound = 0.0;
  bool holds = false;
  bool applicable = false;
};

BpdnBoundReport verify_bpdn_bound(const SparseProblem& p, const SparseSolution& sol,
                                  const CVector& truth, std::size_t s, const BpdnConstants& c);

struct OmpConditions {
  double rhs_260 = 0.0;    // 1/2 + mu (1/2 - s)
  double ratio = 0.0;      // eps / Z_min
  bool met_260 = false;
  double limit_261 = 0.0;  // 1/2 + 1/(2 mu)
  bool met_261 = false;
};

OmpConditions omp_conditions(double epsilon, double z_min, double mu, std::size_t s);

}  // namespace sparsemusic
