#include "sparsemusic/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sparsemusic/forward.hpp"

namespace sparsemusic {

namespace {

// Euclidean projection onto {z : ||A z - y|| <= eps} through a thin SVD of A.
class BallProjector {
 public:
  BallProjector(const CMatrix& a, const CVector& y, double eps) : eps2_(eps * eps) {
    CMatrix u;
    if (!init_from_gram(a, u)) {
      Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const RVector& sv = svd.singularValues();
      Eigen::Index r = 0;
      const double cut = sv.size() ? 1e-12 * sv(0) : 0.0;
      while (r < sv.size() && sv(r) > cut) ++r;
      sig_ = sv.head(r);
      v_ = svd.matrixV().leftCols(r);
      u = svd.matrixU().leftCols(r);
      u_ = u;
    }
    b_ = u.adjoint() * y;
    const double y2 = y.squaredNorm();
    perp2_ = std::max(0.0, (y - u * b_).squaredNorm());
    if (perp2_ > eps2_ * (1.0 + 1e-12) + 1e-20 * y2)
      throw DomainError("bpdn: constraint set is empty (data component outside range(A) exceeds epsilon)");
    affine_ = eps2_ <= perp2_ + 1e-20 * y2;
  }

  CVector project(const CVector& v) {
    const CVector c = coords(v);
    CVector t(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) t(i) = sig_(i) * c(i) - b_(i);
    const double g0 = t.squaredNorm() + perp2_;
    if (!affine_ && g0 <= eps2_) return v;
    CVector delta(c.size());
    if (affine_) {
      for (Eigen::Index i = 0; i < c.size(); ++i) delta(i) = -t(i) / sig_(i);
    } else {
      const double mu = solve_mu(t);
      for (Eigen::Index i = 0; i < c.size(); ++i)
        delta(i) = -mu * sig_(i) * t(i) / (1.0 + mu * sig_(i) * sig_(i));
    }
    return v + lift(delta);
  }

  // argmin_v ||A^* v - w||.
  CVector range_coeffs(const CVector& w) const {
    CVector c = coords(w);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) /= sig_(i);
    return u_ * c;
  }

 private:
  // Wide, well-conditioned matrices: eigen-decompose A A^* (rows x rows)
  // instead of a thin SVD of A; V = A^* U Sigma^{-1} is applied implicitly.
  bool init_from_gram(const CMatrix& a, CMatrix& u) {
    if (a.rows() < 32 || a.rows() * 2 > a.cols()) return false;
    const CMatrix gram = a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    if (es.info() != Eigen::Success) return false;
    const RVector& ev = es.eigenvalues();  // ascending
    // cond(A) below 1e3 keeps the squared problem accurate to ~1e-10.
    if (!(ev(0) > 1e-6 * ev(ev.size() - 1))) return false;
    const Eigen::Index r = ev.size();
    sig_.resize(r);
    u.resize(a.rows(), r);
    for (Eigen::Index i = 0; i < r; ++i) {
      sig_(i) = std::sqrt(ev(r - 1 - i));
      u.col(i) = es.eigenvectors().col(r - 1 - i);
    }
    a_ = a;
    u_ = u;
    gram_mode_ = true;
    return true;
  }

  CVector coords(const CVector& v) const {
    if (!gram_mode_) return v_.adjoint() * v;
    CVector c = u_.adjoint() * (a_ * v);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) /= sig_(i);
    return c;
  }

  CVector lift(const CVector& d) const {
    if (!gram_mode_) return v_ * d;
    CVector w = d;
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) /= sig_(i);
    return a_.adjoint() * (u_ * w);
  }

  double g(const CVector& t, double mu, double* deriv) const {
    double val = perp2_, d = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double s2 = sig_(i) * sig_(i);
      const double q = 1.0 / (1.0 + mu * s2);
      const double w = std::norm(t(i));
      val += w * q * q;
      d -= 2.0 * w * s2 * q * q * q;
    }
    if (deriv) *deriv = d;
    return val;
  }

  // Root of g(mu) = eps^2; g is convex and decreasing, so Newton from the
  // left stays left of the root. The bracket guards against stagnation.
  double solve_mu(const CVector& t) {
    double lo = 0.0;
    double hi = std::max(1.0, 2.0 * mu_warm_);
    while (g(t, hi, nullptr) > eps2_) {
      lo = hi;
      hi *= 4.0;
      if (hi > 1e300) break;
    }
    double mu = lo;
    if (mu_warm_ > lo && mu_warm_ < hi && g(t, mu_warm_, nullptr) > eps2_) mu = mu_warm_;
    for (int it = 0; it < 200; ++it) {
      double d = 0.0;
      const double val = g(t, mu, &d) - eps2_;
      if (val > 0.0) lo = mu; else hi = mu;
      if (std::abs(val) <= 1e-13 * eps2_ || hi - lo <= 1e-15 * hi) break;
      double next = d < 0.0 ? mu - val / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      mu = next;
    }
    // Settle on the feasible side; a Newton iterate that met the tolerance
    // from the left is kept (hi may still be the loose initial bracket).
    if (g(t, mu, nullptr) > eps2_ * (1.0 + 1e-12)) mu = hi;
    mu_warm_ = mu;
    return mu;
  }

  double eps2_;
  double perp2_ = 0.0;
  bool affine_ = false;
  double mu_warm_ = 0.0;
  RVector sig_;
  CMatrix v_;
  CVector b_;
  bool gram_mode_ = false;
  CMatrix a_;
  CMatrix u_;
};

CVector soft_threshold(const CVector& v, double t) {
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    out(i) = a > t ? v(i) * ((a - t) / a) : cplx(0.0, 0.0);
  }
  return out;
}

void validate(const SparseProblem& p) {
  if (p.matrix.rows() != p.data.size())
    throw std::invalid_argument("sparse problem: data length does not match matrix rows");
  if (!(p.epsilon >= 0.0)) throw std::invalid_argument("sparse problem: epsilon must be nonnegative");
}

}  // namespace

IndexSet support_above_floor(const CVector& z, double rel_floor) {
  IndexSet out;
  if (z.size() == 0) return out;
  const double top = z.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) return out;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (std::abs(z(i)) > rel_floor * top) out.push_back(static_cast<std::size_t>(i));
  return out;
}

IndexSet largest_entries(const CVector& z, std::size_t s) {
  const auto N = static_cast<std::size_t>(z.size());
  if (s > N) throw std::invalid_argument("largest_entries: s exceeds the vector length");
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(z(static_cast<Eigen::Index>(a))) > std::abs(z(static_cast<Eigen::Index>(b)));
  });
  IndexSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  std::sort(out.begin(), out.end());
  return out;
}

CVector best_s_term(const CVector& z, std::size_t s) {
  CVector out = CVector::Zero(z.size());
  for (std::size_t i : largest_entries(z, s)) out(static_cast<Eigen::Index>(i)) = z(static_cast<Eigen::Index>(i));
  return out;
}

namespace {

// Exact basis-pursuit finish: least squares on the iterate's support T, then
// the dual certificate v = A_T (A_T^* A_T)^{-1} sgn(z_T). If A_T has full
// column rank, A_T z_T = y and |a_j^* v| < 1 off T, z is the unique
// minimizer of ||z||_1 subject to A z = y.
IndexSet iterate_support(const CVector& iterate, double rel) {
  IndexSet t;
  const double top = iterate.size() ? iterate.cwiseAbs().maxCoeff() : 0.0;
  if (!(top > 0.0)) return t;
  for (Eigen::Index j = 0; j < iterate.size(); ++j)
    if (std::abs(iterate(j)) > rel * top) t.push_back(static_cast<std::size_t>(j));
  return t;
}

// v0 seeds the dual vector (zero gives the least-squares certificate); it is
// corrected on T so that A_T^* v = sgn(z_T) holds exactly.
bool certify_bp(const SparseProblem& p, const IndexSet& t, const CVector& v0, CVector& out) {
  const auto M = p.matrix.rows();
  const auto k = static_cast<Eigen::Index>(t.size());
  if (k == 0 || k >= M) return false;
  const CMatrix at = select_columns(p.matrix, t);
  Eigen::ColPivHouseholderQR<CMatrix> qr(at);
  const auto r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const double d0 = std::abs(qr.matrixR()(0, 0));
  if (!(std::abs(qr.matrixR()(k - 1, k - 1)) > 1e-8 * d0)) return false;
  const CVector zt = qr.solve(p.data);
  if ((at * zt - p.data).norm() > 1e-10 * p.data.norm()) return false;
  CVector sgn(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double a = std::abs(zt(i));
    if (!(a > 0.0)) return false;
    sgn(i) = zt(i) / a;
  }
  // A_T P = Q R  =>  A_T (A_T^* A_T)^{-1} g = Q R^{-*} P^T g.
  const CVector g = sgn - at.adjoint() * v0;
  const CVector w = r.adjoint().solve(qr.colsPermutation().transpose() * g);
  CVector qw = CVector::Zero(M);
  qw.head(k) = w;
  const CVector v = v0 + qr.householderQ() * qw;
  const CVector corr = p.matrix.adjoint() * v;
  std::vector<bool> on(static_cast<std::size_t>(p.matrix.cols()), false);
  for (std::size_t j : t) on[j] = true;
  for (Eigen::Index j = 0; j < corr.size(); ++j)
    if (!on[static_cast<std::size_t>(j)] && std::abs(corr(j)) >= 1.0 - 1e-9) return false;
  out = CVector::Zero(p.matrix.cols());
  for (Eigen::Index i = 0; i < k; ++i) out(static_cast<Eigen::Index>(t[static_cast<std::size_t>(i)])) = zt(i);
  return true;
}

}  // namespace

SparseSolution bpdn_solve(const SparseProblem& p, const BpdnOptions& opts) {
  validate(p);
  const auto N = p.matrix.cols();
  SparseSolution sol;
  if (p.data.norm() <= p.epsilon) {
    // Zero is feasible and minimizes the norm.
    sol.z_hat = CVector::Zero(N);
    sol.residual = p.data.norm();
    sol.converged = true;
    return sol;
  }
  BallProjector proj(p.matrix, p.data, p.epsilon);
  CVector z = proj.project(CVector::Zero(N));
  CVector x = z;
  CVector u = CVector::Zero(N);
  const double zmax = z.cwiseAbs().maxCoeff();
  double rho = opts.rho > 0.0 ? opts.rho : 1.0 / std::max(0.1 * zmax, 1e-300);

  CVector best = z;
  double best_obj = z.lpNorm<1>();
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const bool attempt = p.epsilon == 0.0 && opts.certify && it % 25 == 0;
    x = soft_threshold(z - u, 1.0 / rho);
    // rho (z - u - x) is a subgradient of ||.||_1 at x: the dual seed.
    const CVector subgrad = attempt ? CVector(rho * (z - u - x)) : CVector();
    const CVector z_old = z;
    z = proj.project(x + u);
    u += x - z;
    sol.iterations = it;

    const double r = (x - z).norm();
    const double s = rho * (z - z_old).norm();
    const double scale_p = std::max({x.norm(), z.norm(), 1e-300});
    const double scale_d = std::max(rho * u.norm(), 1e-300);
    const double obj = z.lpNorm<1>();
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
    if (r <= opts.tol * scale_p && s <= opts.tol * scale_d) {
      sol.converged = true;
      best = z;
      break;
    }
    if (attempt) {
      // Candidate supports at a few floors, each with the ADMM dual seed.
      CVector exact;
      bool done = false;
      const CVector v0 = proj.range_coeffs(subgrad);
      IndexSet prev;
      for (double floor : {1e-1, 1e-2, 1e-3}) {
        IndexSet t = iterate_support(x, floor);
        if (t == prev) continue;
        done = certify_bp(p, t, v0, exact);
        prev = std::move(t);
        if (done) break;
      }
      if (done) {
        sol.converged = true;
        sol.certified = true;
        best = exact;
        break;
      }
    }
    if (it % 10 != 0) continue;
    if (r > 10.0 * s) {
      rho *= 2.0;
      u *= 0.5;
    } else if (s > 10.0 * r) {
      rho *= 0.5;
      u *= 2.0;
    }
  }
  sol.z_hat = best;
  sol.objective = best.lpNorm<1>();
  sol.residual = (p.data - p.matrix * best).norm();
  sol.support = support_above_floor(best);
  return sol;
}

SparseSolution omp_solve(const SparseProblem& p, std::size_t s) {
  validate(p);
  if (s > static_cast<std::size_t>(p.matrix.rows()))
    throw std::invalid_argument("omp: target sparsity exceeds the number of rows");
  const auto N = p.matrix.cols();
  SparseSolution sol;
  sol.z_hat = CVector::Zero(N);
  CVector resid = p.data;
  IndexSet chosen;
  CVector coef;
  std::vector<bool> used(static_cast<std::size_t>(N), false);
  for (std::size_t step = 0; step < s; ++step) {
    if (resid.norm() <= p.epsilon) break;
    const CVector corr = p.matrix.adjoint() * resid;
    double best = -1.0;
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < N; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(corr(j));
      if (c > best * (1.0 + 1e-12)) {
        best = c;
        pick = j;
      } else if (c >= best * (1.0 - 1e-12)) {
        sol.tie = true;  // lower index already holds the slot
      }
    }
    if (pick < 0) break;
    used[static_cast<std::size_t>(pick)] = true;
    chosen.push_back(static_cast<std::size_t>(pick));
    const CMatrix sub = select_columns(p.matrix, chosen);
    coef = sub.colPivHouseholderQr().solve(p.data);
    resid = p.data - sub * coef;
    sol.iterations = step + 1;
  }
  for (std::size_t i = 0; i < chosen.size(); ++i)
    sol.z_hat(static_cast<Eigen::Index>(chosen[i])) = coef(static_cast<Eigen::Index>(i));
  sol.objective = sol.z_hat.lpNorm<1>();
  sol.residual = resid.norm();
  sol.converged = true;
  sol.support = chosen;
  std::sort(sol.support.begin(), sol.support.end());
  return sol;
}

BpdnConstants bpdn_error_constants(double delta_minus_2s, double delta_plus_2s) {
  BpdnConstants c;
  const double h = std::sqrt(2.0) / 2.0;
  c.condition_value = h * delta_plus_2s + (h + 1.0) * delta_minus_2s;
  c.condition_met = c.condition_value < 1.0;
  if (c.condition_met) {
    const double d = 1.0 - c.condition_value;
    c.c1 = (2.0 + (std::sqrt(2.0) - 2.0) * delta_minus_2s + std::sqrt(2.0) * delta_plus_2s) / d;
    c.c2 = 4.0 * std::sqrt(1.0 + delta_plus_2s) / d;
  }
  return c;
}

BpdnBoundReport verify_bpdn_bound(const SparseProblem& p, const SparseSolution& sol,
                                  const CVector& truth, std::size_t s, const BpdnConstants& c) {
  if (s == 0) throw std::invalid_argument("verify_bpdn_bound: s must be >= 1");
  BpdnBoundReport rep;
  rep.applicable = c.condition_met;
  rep.error = (sol.z_hat - truth).norm();
  if (!c.condition_met) return rep;
  rep.sparse_term = c.c1 / std::sqrt(static_cast<double>(s)) * (truth - best_s_term(truth, s)).lpNorm<1>();
  rep.noise_term = c.c2 * p.epsilon;
  rep.bound = rep.sparse_term + rep.noise_term;
  rep.holds = rep.error <= rep.bound + 1e-6;
  return rep;
}

OmpConditions omp_conditions(double epsilon, double z_min, double mu, std::size_t s) {
  OmpConditions c;
  const double sd = static_cast<double>(s);
  c.rhs_260 = 0.5 + mu * (0.5 - sd);
  c.ratio = z_min > 0.0 ? epsilon / z_min : std::numeric_limits<double>::infinity();
  c.met_260 = c.ratio <= c.rhs_260;
  c.limit_261 = mu > 0.0 ? 0.5 + 0.5 / mu : std::numeric_limits<double>::infinity();
  c.met_261 = sd < c.limit_261;
  return c;
}

}  // namespace sparsemusic
