#include "sparsemusic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sparsemusic/forward.hpp"
#include "sparsemusic/music.hpp"
#include "sparsemusic/rng.hpp"

namespace sparsemusic {

CoherenceReport mutual_coherence(const CMatrix& m) {
  const auto N = m.cols();
  RVector norms(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    norms(j) = m.col(j).norm();
    if (!(norms(j) > 0.0))
      throw std::invalid_argument("mutual_coherence: column " + std::to_string(j) + " is zero");
  }
  CoherenceReport rep;
  if (N < 2) return rep;
  const CMatrix gram = m.adjoint() * m;
  rep.mu = -1.0;
  for (Eigen::Index j = 1; j < N; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double c = std::abs(gram(i, j)) / (norms(i) * norms(j));
      if (c > rep.mu) {
        rep.mu = c;
        rep.i = static_cast<std::size_t>(i);
        rep.j = static_cast<std::size_t>(j);
      }
    }
  }
  return rep;
}

std::string to_string(RicMethod method) {
  switch (method) {
    case RicMethod::bruteforce: return "bruteforce";
    case RicMethod::coherence_bound: return "coherence-bound";
    case RicMethod::set_restricted: return "set-restricted";
  }
  return "bruteforce";
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // r * num / i is exact at every step; guard the multiplication.
    if (r > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    r = r * num / i;
  }
  return r;
}

namespace {

// Extreme eigenvalues of the Gram matrix of the selected columns.
std::pair<double, double> gram_extremes(const CMatrix& m, const IndexSet& cols) {
  CMatrix sub = select_columns(m, cols);
  const CMatrix gram = sub.adjoint() * sub;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const RVector& ev = eig.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

RicEstimate from_extremes(std::size_t order, double lmin, double lmax, const IndexSet& cols,
                          RicMethod method) {
  RicEstimate est;
  est.order = order;
  est.method = method;
  est.delta_minus = std::clamp(1.0 - lmin, 0.0, 1.0);
  est.delta_plus = std::max(0.0, lmax - 1.0);
  est.witness_minus = cols;
  est.witness_plus = cols;
  return est;
}

}  // namespace

RicEstimate ric_bruteforce(const CMatrix& m, std::size_t r, std::uint64_t cap) {
  const auto N = static_cast<std::size_t>(m.cols());
  if (r == 0) throw std::invalid_argument("ric_bruteforce: order must be >= 1");
  if (r > N) throw std::invalid_argument("ric_bruteforce: order exceeds the column count");
  const std::uint64_t count = binomial(N, r);
  if (count > cap)
    throw std::length_error("ric_bruteforce: C(" + std::to_string(N) + "," + std::to_string(r) +
                            ") subsets exceed the enumeration cap " + std::to_string(cap) +
                            "; use the set-restricted or coherence-bound method");
  RicEstimate best;
  best.order = r;
  best.method = RicMethod::bruteforce;
  double worst_min = std::numeric_limits<double>::infinity();
  double worst_max = -std::numeric_limits<double>::infinity();
  IndexSet idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    const auto [lmin, lmax] = gram_extremes(m, idx);
    if (lmin < worst_min) {
      worst_min = lmin;
      best.witness_minus = idx;
    }
    if (lmax > worst_max) {
      worst_max = lmax;
      best.witness_plus = idx;
    }
    // Next combination in lexicographic order.
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == N - r + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t k = i; k < r; ++k) idx[k] = idx[k - 1] + 1;
  }
  best.delta_minus = std::clamp(1.0 - worst_min, 0.0, 1.0);
  best.delta_plus = std::max(0.0, worst_max - 1.0);
  return best;
}

RicEstimate ric_coherence_bound(const CoherenceReport& report, std::size_t r) {
  if (r == 0) throw std::invalid_argument("ric_coherence_bound: order must be >= 1");
  RicEstimate est;
  est.order = r;
  est.method = RicMethod::coherence_bound;
  const double b = report.mu * static_cast<double>(r - 1);
  est.delta_plus = b;
  est.delta_minus = std::min(b, 1.0);
  return est;
}

RicEstimate ric_set_restricted(const CMatrix& m, const IndexSet& set) {
  if (set.empty()) throw std::invalid_argument("ric_set_restricted: empty set");
  const auto [lmin, lmax] = gram_extremes(m, set);
  return from_extremes(set.size(), lmin, lmax, set, RicMethod::set_restricted);
}

std::vector<RicEstimate> ric_random_subsets(const CMatrix& m, std::size_t r, std::size_t count,
                                            std::uint64_t seed) {
  const auto N = static_cast<std::size_t>(m.cols());
  if (r == 0 || r > N) throw std::invalid_argument("ric_random_subsets: bad order");
  Rng rng(seed);
  std::vector<RicEstimate> out;
  out.reserve(count);
  std::vector<std::size_t> perm(N);
  for (std::size_t c = 0; c < count; ++c) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < r; ++i) std::swap(perm[i], perm[i + rng.below(N - i)]);
    IndexSet set(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(r));
    std::sort(set.begin(), set.end());
    out.push_back(ric_set_restricted(m, set));
  }
  return out;
}

namespace {

CMatrix range_basis(const CMatrix& phi_ext, const IndexSet& support) {
  const CMatrix phi = select_columns(phi_ext, support);
  Eigen::BDCSVD<CMatrix> svd(phi, Eigen::ComputeThinU);
  const RVector& sv = svd.singularValues();
  if (sv.size() == 0) return CMatrix(phi_ext.rows(), 0);
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0)))
    throw DomainError("gamma: restricted sensing matrix is rank deficient (condition " +
                      std::to_string(sv(0) / sv(sv.size() - 1)) + ")");
  return svd.matrixU();
}

}  // namespace

GammaReport gamma_over(const CMatrix& phi_ext, const IndexSet& support, const IndexSet& candidates) {
  GammaReport rep;
  if (support.empty()) throw std::invalid_argument("gamma: empty support");
  if (support.size() > static_cast<std::size_t>(phi_ext.rows())) {
    throw DomainError("gamma: support larger than the number of measurements");
  }
  const CMatrix q = range_basis(phi_ext, support);
  if (candidates.empty()) {
    rep.empty_complement = true;
    return rep;
  }
  rep.gamma = std::numeric_limits<double>::infinity();
  for (std::size_t r : candidates) {
    const CVector phi = phi_ext.col(static_cast<Eigen::Index>(r));
    const double norm = phi.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("gamma: zero steering vector");
    const CVector resid = phi - q * (q.adjoint() * phi);
    const double g = resid.norm() / norm;
    if (g < rep.gamma) {
      rep.gamma = g;
      rep.argmin = r;
    }
  }
  rep.gamma = std::min(rep.gamma, 1.0);
  return rep;
}

GammaReport gamma_exact(const CMatrix& phi_ext, const IndexSet& support) {
  IndexSet comp;
  for (std::size_t j = 0; j < static_cast<std::size_t>(phi_ext.cols()); ++j)
    if (!std::binary_search(support.begin(), support.end(), j)) comp.push_back(j);
  return gamma_over(phi_ext, support, comp);
}

GammaReport gamma_exact(const CMatrix& phi_ext, const IndexSet& support, const Grid& grid,
                        double radius) {
  const IndexSet near = neighborhood(grid, support, radius);
  IndexSet comp;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (!std::binary_search(near.begin(), near.end(), j)) comp.push_back(j);
  return gamma_over(phi_ext, support, comp);
}

double ric_quotient(double delta_minus, double delta_plus) {
  return delta_minus * (1.0 + delta_plus) / (2.0 + delta_plus - delta_minus);
}

BoundValue gamma_lower_bound(double delta_minus_s1, double delta_plus_s) {
  BoundValue b;
  b.vacuous = !(delta_minus_s1 < 1.0);
  b.value = b.vacuous ? 0.0 : 1.0 - ric_quotient(delta_minus_s1, delta_plus_s);
  return b;
}

BoundValue gamma_lower_bound(const RicEstimate& ric_s, const RicEstimate& ric_s1) {
  return gamma_lower_bound(ric_s1.delta_minus, ric_s.delta_plus);
}

BoundValue gamma_lower_bound_set(const CMatrix& phi_ext, const IndexSet& support,
                                 const IndexSet& candidates) {
  const RicEstimate base = ric_set_restricted(phi_ext, support);
  double worst = 0.0;
  BoundValue b;
  for (std::size_t r : candidates) {
    IndexSet s1 = support;
    s1.insert(std::upper_bound(s1.begin(), s1.end(), r), r);
    const RicEstimate ext = ric_set_restricted(phi_ext, s1);
    if (!(ext.delta_minus < 1.0)) {
      b.vacuous = true;
      b.value = 0.0;
      return b;
    }
    worst = std::max(worst, ric_quotient(ext.delta_minus, base.delta_plus));
  }
  b.value = 1.0 - worst;
  return b;
}

double delta_margin(double gamma) {
  if (!(gamma >= -1e-12 && gamma <= 1.0 + 1e-12))
    throw std::invalid_argument("delta_margin: Gamma must lie in [0, 1]");
  gamma = std::clamp(gamma, 0.0, 1.0);
  return 0.5 - 0.5 / std::sqrt(std::sqrt(2.0) * gamma + 1.0);
}

double rho_polynomial(double rho) {
  return 1.0 - 8.0 * rho + 20.0 * rho * rho - 20.0 * rho * rho * rho;
}

double rho_star() {
  double lo = 0.2, hi = 0.25;  // p(lo) > 0 > p(hi)
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (rho_polynomial(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double error_term_bound(double epsilon, double delta_plus, double amp_max, BoundCase c) {
  if (epsilon < 0.0) throw std::invalid_argument("error_term_bound: epsilon must be nonnegative");
  const double factor = c == BoundCase::general ? std::sqrt(1.0 + delta_plus) : 1.0 + delta_plus;
  return epsilon * epsilon + 2.0 * amp_max * factor * epsilon;
}

BoundValue sigma_min_bound(double delta_minus, double amp_min, BoundCase c) {
  BoundValue b;
  b.vacuous = !(delta_minus < 1.0);
  if (b.vacuous) return b;
  const double f = 1.0 - delta_minus;
  b.value = (c == BoundCase::general ? f : f * f) * amp_min * amp_min;
  return b;
}

std::string to_string(NsrCase c) {
  switch (c) {
    case NsrCase::nor: return "nor";
    case NsrCase::nsr: return "nsr";
    case NsrCase::half_ric: return "half-ric";
  }
  return "nsr";
}

double nsr_bound(NsrCase c, double dynamic_range, double delta_margin_value, double delta_minus,
                 double delta_plus) {
  const double d = dynamic_range;
  double a = 0.0, b = 0.0;  // bound = sqrt(a^2 d^2 + b) - a d
  switch (c) {
    case NsrCase::nor:
      a = std::sqrt(1.0 + delta_plus);
      b = (1.0 - delta_minus) * delta_margin_value;
      break;
    case NsrCase::nsr:
      a = 1.0 + delta_plus;
      b = (1.0 - delta_minus) * (1.0 - delta_minus) * delta_margin_value;
      break;
    case NsrCase::half_ric:
      a = 1.5;
      b = 0.25 * delta_margin_value;
      break;
  }
  if (b <= 0.0) return 0.0;
  // Rationalized difference avoids cancellation when b << (a d)^2.
  return b / (std::sqrt(a * a * d * d + b) + a * d);
}

NsrCheck nsr_admissible(NsrCase c, double epsilon, double amp_min, double amp_max,
                        double delta_margin_value, double delta_minus, double delta_plus) {
  if (!(amp_min > 0.0)) throw std::invalid_argument("nsr_admissible: minimum amplitude must be positive");
  NsrCheck out;
  out.bound = nsr_bound(c, amp_max / amp_min, delta_margin_value, delta_minus, delta_plus);
  out.measured = epsilon / amp_min;
  out.satisfied = out.measured < out.bound;
  return out;
}

CMatrix squared_error_term(const CMatrix& y, const CMatrix& e) {
  return e * y.adjoint() + y * e.adjoint() + e * e.adjoint();
}

RVector principal_angle_sines(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("principal angles: bases differ in shape");
  if (a.cols() == 0) return RVector();
  const CMatrix resid = b - a * (a.adjoint() * b);
  Eigen::BDCSVD<CMatrix> svd(resid);
  RVector s = svd.singularValues().cwiseMin(1.0);
  return s;
}

PerturbationReport perturbation_check(const CMatrix& y, const CMatrix& e, std::size_t s) {
  if (y.rows() != e.rows() || y.cols() != e.cols())
    throw std::invalid_argument("perturbation_check: data and noise shapes differ");
  const auto n = y.rows();
  if (s == 0 || static_cast<Eigen::Index>(s) >= n)
    throw std::invalid_argument("perturbation_check: need 0 < s < n");
  const auto si = static_cast<Eigen::Index>(s);
  PerturbationReport rep;

  const CMatrix ycal = y * y.adjoint();
  const CMatrix ecal = squared_error_term(y, e);
  Eigen::BDCSVD<CMatrix> svd(y, Eigen::ComputeFullU);
  const CMatrix q = svd.matrixU();
  const CMatrix q1 = q.leftCols(si);
  const CMatrix q2 = q.rightCols(n - si);
  const RVector& sv = svd.singularValues();
  if (sv.size() < si) throw DomainError("perturbation_check: data has fewer than s singular values");
  rep.sigma_min = sv(si - 1) * sv(si - 1);
  if (!(rep.sigma_min > 1e-14 * sv(0) * sv(0)))
    throw DomainError("perturbation_check: clean data has rank below s");

  rep.e11 = spectral_norm(q1.adjoint() * ecal * q1);
  rep.e12 = spectral_norm(q1.adjoint() * ecal * q2);
  rep.e21 = spectral_norm(q2.adjoint() * ecal * q1);
  rep.e22 = spectral_norm(q2.adjoint() * ecal * q2);
  rep.e_norm = spectral_norm(ecal);
  rep.rho = rep.e_norm / rep.sigma_min;
  rep.below_rho_star = rep.rho < rho_star();

  const double denom = rep.sigma_min - rep.e11 - rep.e22;
  rep.condition_205 = denom > 0.0 ? std::sqrt(rep.e12 * rep.e21) / denom
                                   : std::numeric_limits<double>::infinity();
  rep.condition_205_met = rep.condition_205 < 0.5;
  rep.f_bound = denom > 0.0 ? 2.0 * rep.e21 / denom : std::numeric_limits<double>::infinity();

  // Perturbed invariant subspaces from the SVD of the noisy data.
  const CMatrix ye = y + e;
  Eigen::BDCSVD<CMatrix> svde(ye, Eigen::ComputeFullU);
  const CMatrix q1e = svde.matrixU().leftCols(si);
  const CMatrix q2e = svde.matrixU().rightCols(n - si);
  RVector sve = RVector::Zero(n);
  sve.head(svde.singularValues().size()) = svde.singularValues();
  rep.signal_min = sve(si - 1) * sve(si - 1);
  rep.noise_max = sve(si) * sve(si);

  // F from the span of Q1e: Q2^* Q1e (Q1^* Q1e)^{-1}.
  const CMatrix c11 = q1.adjoint() * q1e;
  const CMatrix c21 = q2.adjoint() * q1e;
  Eigen::FullPivLU<CMatrix> lu(c11);
  if (lu.isInvertible()) {
    const CMatrix f = c21 * lu.inverse();
    rep.f_norm = spectral_norm(f);
    // Q2e in the F-parametrized basis: (Q2 - Q1 F^*)(I + F F^*)^{-1/2}.
    const CMatrix ff = CMatrix::Identity(n - si, n - si) + f * f.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(ff);
    const CMatrix inv_sqrt = eig.eigenvectors() *
                             eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             eig.eigenvectors().adjoint();
    const CMatrix q2f = (q2 - q1 * f.adjoint()) * inv_sqrt;
    rep.basis_distance = spectral_norm(q2f - q2);
  } else {
    rep.f_norm = std::numeric_limits<double>::infinity();
    rep.basis_distance = std::numeric_limits<double>::infinity();
  }

  const RVector sines = principal_angle_sines(q2, q2e);
  const double smax = sines.size() ? sines.maxCoeff() : 0.0;
  rep.gap_metric = smax;
  rep.subspace_distance = 2.0 * std::sin(0.5 * std::asin(smax));

  const double r = rep.rho;
  rep.distance_bound = r < 0.5 ? 2.0 * r * (1.0 - r) / ((1.0 - 2.0 * r) * (1.0 - 2.0 * r))
                               : std::numeric_limits<double>::infinity();
  if (r < 0.5) {
    const double t = 4.0 * r * r / ((1.0 - 2.0 * r) * (1.0 - 2.0 * r));
    const double sm = rep.sigma_min;
    rep.separation_lower = sm * (1.0 - r - 2.0 * r * r / (1.0 - 2.0 * r)) / std::sqrt(1.0 + t);
    rep.separation_upper = sm * std::sqrt(1.0 + t) * (r + 2.0 * r * r / (1.0 - 2.0 * r));
  }

  rep.bounds_hold = true;
  if (rep.condition_205_met) rep.bounds_hold = rep.f_norm <= rep.f_bound * (1.0 + 1e-9) + 1e-14;
  if (rep.below_rho_star) {
    rep.bounds_hold = rep.bounds_hold &&
                      rep.subspace_distance <= rep.distance_bound * (1.0 + 1e-9) + 1e-14 &&
                      rep.signal_min > rep.noise_max;
  }
  return rep;
}

StabilityBudget compute_budget(const CMatrix& phi_ext, const CMatrix& psi_ext, const Scene& scene,
                               const CMatrix& noise, const BudgetOptions& options,
                               const Grid* grid) {
  if (scene.support.empty()) throw std::invalid_argument("budget: empty scene");
  StabilityBudget b;
  b.s = scene.sparsity();
  const CMatrix phi = select_columns(phi_ext, scene.support);
  const CMatrix psi = select_columns(psi_ext, scene.support);
  CVector xi(static_cast<Eigen::Index>(b.s));
  for (std::size_t j = 0; j < b.s; ++j) xi(static_cast<Eigen::Index>(j)) = scene.amplitudes[j];
  const CMatrix z = xi.asDiagonal() * psi.adjoint();
  const CMatrix y = phi * z;
  const CMatrix e = noise.size() ? noise : CMatrix::Zero(y.rows(), y.cols());

  {
    Eigen::BDCSVD<CMatrix> zs(z);
    const RVector& sv = zs.singularValues();
    b.zeta_max = sv(0);
    b.zeta_min = static_cast<Eigen::Index>(b.s) <= z.cols() ? sv(static_cast<Eigen::Index>(b.s) - 1) : 0.0;
  }
  b.xi_min = *scene.xi_min();
  b.xi_max = *scene.xi_max();
  b.dynamic_range = b.xi_max / b.xi_min;
  b.epsilon = spectral_norm(e);

  {
    Eigen::BDCSVD<CMatrix> ys(y);
    const RVector& sv = ys.singularValues();
    const double smin = static_cast<Eigen::Index>(b.s) <= sv.size() ? sv(static_cast<Eigen::Index>(b.s) - 1) : 0.0;
    b.sigma_min = smin * smin;
  }
  b.e_norm = spectral_norm(squared_error_term(y, e));
  b.rho = b.sigma_min > 0.0 ? b.e_norm / b.sigma_min : std::numeric_limits<double>::infinity();
  b.rho_star = rho_star();

  const GammaReport g = gamma_exact(phi_ext, scene.support);
  b.gamma = g.gamma;
  b.delta_margin = delta_margin(b.gamma);
  if (options.radius > 0.0 && grid) {
    b.gamma_ell = gamma_exact(phi_ext, scene.support, *grid, options.radius).gamma;
    b.delta_margin_ell = delta_margin(b.gamma_ell);
  }

  auto merge = [](RicEstimate a, const RicEstimate& other) {
    if (other.delta_minus > a.delta_minus) {
      a.delta_minus = other.delta_minus;
      a.witness_minus = other.witness_minus;
    }
    if (other.delta_plus > a.delta_plus) {
      a.delta_plus = other.delta_plus;
      a.witness_plus = other.witness_plus;
    }
    return a;
  };

  const IndexSet comp = scene.complement(static_cast<std::size_t>(phi_ext.cols()));
  switch (options.ric) {
    case RicMethod::bruteforce:
      b.ric_s = merge(ric_bruteforce(phi_ext, b.s, options.cap), ric_bruteforce(psi_ext, b.s, options.cap));
      b.ric_s1 = merge(ric_bruteforce(phi_ext, b.s + 1, options.cap),
                       ric_bruteforce(psi_ext, b.s + 1, options.cap));
      break;
    case RicMethod::coherence_bound: {
      const CoherenceReport cp = mutual_coherence(phi_ext);
      const CoherenceReport cq = mutual_coherence(psi_ext);
      const CoherenceReport c = cp.mu >= cq.mu ? cp : cq;
      b.ric_s = ric_coherence_bound(c, b.s);
      b.ric_s1 = ric_coherence_bound(c, b.s + 1);
      break;
    }
    case RicMethod::set_restricted: {
      b.ric_s = merge(ric_set_restricted(phi_ext, scene.support), ric_set_restricted(psi_ext, scene.support));
      b.ric_s1 = b.ric_s;
      b.ric_s1.order = b.s + 1;
      b.ric_s1.delta_minus = 0.0;
      for (std::size_t r : comp) {
        IndexSet s1 = scene.support;
        s1.insert(std::upper_bound(s1.begin(), s1.end(), r), r);
        b.ric_s1 = merge(b.ric_s1, ric_set_restricted(phi_ext, s1));
        b.ric_s1 = merge(b.ric_s1, ric_set_restricted(psi_ext, s1));
      }
      break;
    }
  }

  const BoundValue lower = gamma_lower_bound(b.ric_s, b.ric_s1);
  b.gamma_lower = lower.value;
  b.gamma_lower_vacuous = lower.vacuous;
  b.delta_margin_lower = delta_margin(std::clamp(lower.value, 0.0, 1.0));

  const double dm = b.ric_s.delta_minus;
  const double dp = b.ric_s.delta_plus;
  b.sigma_min_bound_general = sigma_min_bound(dm, b.zeta_min, BoundCase::general).value;
  b.sigma_min_bound_scattering = sigma_min_bound(dm, b.xi_min, BoundCase::scattering).value;
  b.error_bound_general = error_term_bound(b.epsilon, dp, b.zeta_max, BoundCase::general);
  b.error_bound_scattering = error_term_bound(b.epsilon, dp, b.xi_max, BoundCase::scattering);

  if (b.zeta_min > 0.0)
    b.nor = nsr_admissible(NsrCase::nor, b.epsilon, b.zeta_min, b.zeta_max, b.delta_margin_lower, dm, dp);
  b.nsr = nsr_admissible(NsrCase::nsr, b.epsilon, b.xi_min, b.xi_max, b.delta_margin_lower, dm, dp);

  b.threshold_gamma = b.gamma > 0.0 ? 2.0 / (b.gamma * b.gamma) : std::numeric_limits<double>::infinity();
  b.threshold_ric = lower.value > 0.0 ? 2.0 / (lower.value * lower.value)
                                      : std::numeric_limits<double>::infinity();

  const double slack = 1e-12;
  b.entries = {
      {"gamma_lower_bound", b.gamma, b.gamma_lower, b.gamma + slack >= b.gamma_lower},
      {"sigma_min_general", b.sigma_min, b.sigma_min_bound_general,
       b.sigma_min * (1 + 1e-10) + slack >= b.sigma_min_bound_general},
      {"sigma_min_scattering", b.sigma_min, b.sigma_min_bound_scattering,
       b.sigma_min * (1 + 1e-10) + slack >= b.sigma_min_bound_scattering},
      {"error_term_general", b.e_norm, b.error_bound_general,
       b.e_norm <= b.error_bound_general * (1 + 1e-10) + slack},
      {"error_term_scattering", b.e_norm, b.error_bound_scattering,
       b.e_norm <= b.error_bound_scattering * (1 + 1e-10) + slack},
      {"rho_vs_delta", b.rho, b.delta_margin, b.rho < b.delta_margin},
      {"nor", b.nor.measured, b.nor.bound, b.nor.satisfied},
      {"nsr", b.nsr.measured, b.nsr.bound, b.nsr.satisfied},
  };
  return b;
}

}  // namespace sparsemusic
