#include <doctest.h>

#include "oracles.hpp"
#include "sparsemusic/analysis.hpp"
#include "sparsemusic/forward.hpp"

using namespace sparsemusic;

TEST_SUITE("analysis") {

TEST_CASE("coherence of orthogonal and parallel columns") {
  CHECK(mutual_coherence(CMatrix::Identity(4, 4)).mu == 0.0);
  CMatrix m = oracle::random_complex(5, 3, 1);
  m.col(2) = m.col(0) * cplx(0, 2);
  const CoherenceReport r = mutual_coherence(m);
  CHECK(r.mu == doctest::Approx(1.0));
  CHECK(((r.i == 0 && r.j == 2) || (r.i == 2 && r.j == 0)));
  CMatrix z = m;
  z.col(1).setZero();
  CHECK_THROWS(mutual_coherence(z));
}

TEST_CASE("coherence matches a pairwise loop") {
  const CMatrix m = oracle::partial_fourier(4, 8, 3);
  double mu = 0.0;
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      if (i != j) mu = std::max(mu, std::abs(m.col(i).dot(m.col(j))) / (m.col(i).norm() * m.col(j).norm()));
  CHECK(mutual_coherence(m).mu == doctest::Approx(mu).epsilon(1e-14));
}

TEST_CASE("binomial saturates") {
  CHECK(binomial(12, 2) == 66);
  CHECK(binomial(5, 7) == 0);
  CHECK(binomial(200, 100) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("brute-force RIC") {
  SUBCASE("orthonormal columns are isometric") {
    const CMatrix q = oracle::gram_schmidt(oracle::random_complex(8, 5, 2));
    for (std::size_t r = 1; r <= 5; ++r) {
      const RicEstimate e = ric_bruteforce(q, r);
      CHECK(e.delta_minus < 1e-12);
      CHECK(e.delta_plus < 1e-12);
    }
  }
  SUBCASE("order one on unit columns") {
    const RicEstimate e = ric_bruteforce(oracle::unit_columns(oracle::random_complex(4, 9, 3)), 1);
    CHECK(e.delta_minus < 1e-14);
    CHECK(e.delta_plus < 1e-14);
  }
  SUBCASE("order two equals the closed-form pair spectrum") {
    const CMatrix m = oracle::partial_fourier(6, 12, 4);
    double lo = 1.0, hi = 1.0;
    int pairs = 0;
    for (Eigen::Index i = 0; i < 12; ++i)
      for (Eigen::Index j = i + 1; j < 12; ++j, ++pairs) {
        auto [a, b] = oracle::pair_spectrum(m.col(i), m.col(j));
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
    CHECK(pairs == 66);
    const RicEstimate e = ric_bruteforce(m, 2);
    CHECK(e.delta_minus == doctest::Approx(1.0 - lo).epsilon(1e-12));
    CHECK(e.delta_plus == doctest::Approx(hi - 1.0).epsilon(1e-12));
  }
  SUBCASE("monotone in the order") {
    const CMatrix m = oracle::unit_columns(oracle::random_complex(6, 10, 5));
    RicEstimate prev = ric_bruteforce(m, 1);
    for (std::size_t r = 2; r <= 5; ++r) {
      const RicEstimate cur = ric_bruteforce(m, r);
      CHECK(cur.delta_minus >= prev.delta_minus - 1e-14);
      CHECK(cur.delta_plus >= prev.delta_plus - 1e-14);
      prev = cur;
    }
  }
  SUBCASE("enumeration cap") {
    CHECK_THROWS_AS(ric_bruteforce(oracle::random_complex(4, 40, 1), 10, 1000), std::length_error);
  }
}

TEST_CASE("coherence bound dominates") {
  const CMatrix m = oracle::partial_fourier(6, 12, 6);
  const CoherenceReport c = mutual_coherence(m);
  const RicEstimate b2 = ric_coherence_bound(c, 2);
  CHECK(b2.delta_plus == doctest::Approx(c.mu));
  const RicEstimate e2 = ric_bruteforce(m, 2);
  CHECK(e2.delta_plus <= c.mu + 1e-12);
  CHECK(e2.delta_minus <= c.mu + 1e-12);
  const RicEstimate b3 = ric_coherence_bound(c, 3), e3 = ric_bruteforce(m, 3);
  CHECK(b3.delta_plus >= e3.delta_plus - 1e-12);
  CHECK(b3.delta_minus >= e3.delta_minus - 1e-12);
  CoherenceReport zero;
  CHECK(ric_coherence_bound(zero, 4).delta_plus == 0.0);
  CHECK(ric_coherence_bound(zero, 4).delta_minus == 0.0);
}

TEST_CASE("gamma") {
  SUBCASE("orthogonal complement gives one") {
    const CMatrix m = CMatrix::Identity(5, 5);
    CHECK(gamma_exact(m, {0, 2}).gamma == doctest::Approx(1.0));
  }
  SUBCASE("full range gives zero") {
    const CMatrix m = oracle::unit_columns(oracle::random_complex(3, 8, 2));
    CHECK(gamma_exact(m, {1, 4, 6}).gamma < 1e-12);
  }
  SUBCASE("matches a Gram-Schmidt oracle") {
    const Grid g = Grid::planar(10, 10.0);
    SamplingOptions o;
    o.incident_count = 1;
    const auto sch = draw_directions(20, SamplingKind::planar_fourier_directions, 8, o);
    const CMatrix phi = farfield_pair(g, sch).phi_ext;
    const IndexSet S = {3, 17, 42, 66, 91};
    const CMatrix q = oracle::gram_schmidt(select_columns(phi, S));
    double best = 1.0;
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
      if (std::binary_search(S.begin(), S.end(), static_cast<std::size_t>(j))) continue;
      const CVector r = phi.col(j) - q * (q.adjoint() * phi.col(j));
      best = std::min(best, r.norm() / phi.col(j).norm());
    }
    CHECK(gamma_exact(phi, S).gamma == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("gamma lower bound") {
  CHECK(gamma_lower_bound(0.0, 0.0).value == doctest::Approx(1.0));
  CHECK(gamma_lower_bound(0.5, 0.5).value == doctest::Approx(5.0 / 8.0));
  CHECK(ric_quotient(0.5, 0.5) == doctest::Approx(3.0 / 8.0));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CMatrix m = oracle::unit_columns(oracle::random_complex(6, 9, 40 + seed));
    const IndexSet S = {1, 5};
    const BoundValue b = gamma_lower_bound(ric_bruteforce(m, 2), ric_bruteforce(m, 3));
    if (!b.vacuous) CHECK(b.value <= gamma_exact(m, S).gamma + 1e-12);
  }
}

TEST_CASE("ric quotient increases in each argument") {
  for (double a = 0.0; a < 0.95; a += 0.1)
    for (double b = 0.0; b < 2.0; b += 0.2) {
      CHECK(ric_quotient(a + 0.05, b) >= ric_quotient(a, b));
      CHECK(ric_quotient(a, b + 0.1) >= ric_quotient(a, b));
    }
}

TEST_CASE("delta margin") {
  CHECK(delta_margin(0.0) == doctest::Approx(0.0));
  CHECK(delta_margin(1.0) == doctest::Approx(0.5 - 0.5 / std::sqrt(std::sqrt(2.0) + 1.0)).epsilon(1e-14));
  CHECK(delta_margin(1.0) == doctest::Approx(0.1785).epsilon(1e-3));
  double prev = -1.0;
  for (double g = 0.0; g <= 1.0 + 1e-12; g += 0.01) {
    const double d = delta_margin(g);
    CHECK(d > prev);
    CHECK(d < 0.2);
    CHECK(d < rho_star());
    prev = d;
  }
}

TEST_CASE("rho star") {
  // Independent bisection on the cubic.
  auto p = [](double r) { return 1 - 8 * r + 20 * r * r - 20 * r * r * r; };
  double lo = 0.2, hi = 0.25;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p(lo) * p(mid) <= 0 ? hi : lo) = mid;
  }
  const double r = rho_star();
  CHECK(r > 0.2);
  CHECK(r < 0.25);
  CHECK(std::abs(rho_polynomial(r)) <= 1e-10);
  CHECK(r == doctest::Approx(lo).epsilon(1e-12));
  CHECK(r == doctest::Approx(0.2178).epsilon(1e-3));
}

TEST_CASE("error and sigma bounds") {
  CHECK(error_term_bound(0.0, 0.3, 2.0, BoundCase::general) == 0.0);
  CHECK(error_term_bound(0.1, 0.0, 1.0, BoundCase::general) == doctest::Approx(0.21));
  CHECK(error_term_bound(0.1, 0.0, 1.0, BoundCase::scattering) == doctest::Approx(0.21));
  CHECK(sigma_min_bound(0.0, 1.5, BoundCase::scattering).value == doctest::Approx(2.25));
  CHECK(sigma_min_bound(0.2, 0.0, BoundCase::general).value == 0.0);
}

TEST_CASE("isometric factors attain the sigma bound") {
  const CMatrix q = oracle::gram_schmidt(oracle::random_complex(8, 3, 9));
  const std::vector<double> xi = {1.2, 2.0, 1.5};
  CMatrix y = CMatrix::Zero(8, 8);
  for (Eigen::Index j = 0; j < 3; ++j) y += xi[static_cast<std::size_t>(j)] * q.col(j) * q.col(j).adjoint();
  Eigen::JacobiSVD<CMatrix> svd(y * y.adjoint());
  CHECK(svd.singularValues()(2) == doctest::Approx(1.2 * 1.2).epsilon(1e-12));
  CHECK(sigma_min_bound(0.0, 1.2, BoundCase::scattering).value == doctest::Approx(1.44));
}

TEST_CASE("nsr bounds") {
  CHECK(nsr_bound(NsrCase::half_ric, 1.0, 0.16, 0, 0) == doctest::Approx(std::sqrt(2.25 + 0.04) - 1.5).epsilon(1e-12));
  CHECK(nsr_bound(NsrCase::half_ric, 1.0, 0.16, 0, 0) == doctest::Approx(0.013275).epsilon(1e-4));
  CHECK(nsr_bound(NsrCase::nsr, 1.3, 0.0, 0.2, 0.1) == 0.0);
  CHECK(nsr_bound(NsrCase::nor, 1.3, 0.0, 0.2, 0.1) == 0.0);
  double prev_gap = 1.0;
  for (double dm : {0.99, 0.999}) {
    const double dp = 0.3, delta = 0.15, d = 1.7;
    const double proxy = (1 - dm) * (1 - dm) * delta / (2 * (1 + dp) * d);
    const double ratio = nsr_bound(NsrCase::nsr, d, delta, dm, dp) / proxy;
    CHECK(std::abs(ratio - 1.0) < 1e-3);
    CHECK(std::abs(ratio - 1.0) < prev_gap);
    prev_gap = std::abs(ratio - 1.0);
  }
  const NsrCheck c = nsr_admissible(NsrCase::half_ric, 0.01, 1.0, 1.0, 0.16);
  CHECK(c.satisfied);
  CHECK(c.measured == doctest::Approx(0.01));
}

TEST_CASE("perturbation check") {
  const CMatrix phi = oracle::unit_columns(oracle::random_complex(10, 3, 1));
  const CMatrix psi = oracle::unit_columns(oracle::random_complex(10, 3, 2));
  const CMatrix y = phi * RVector::LinSpaced(3, 1.0, 2.0).cast<cplx>().asDiagonal() * psi.adjoint();
  SUBCASE("zero noise") {
    const PerturbationReport r = perturbation_check(y, CMatrix::Zero(10, 10), 3);
    CHECK(r.e11 == 0.0);
    CHECK(r.e22 == 0.0);
    CHECK(r.subspace_distance < 1e-10);
    CHECK(r.gap_metric < 1e-10);
  }
  SUBCASE("small noise obeys the distance bound against an independent angle oracle") {
    int tested = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const CMatrix e = 0.002 * oracle::random_complex(10, 10, 100 + seed);
      const PerturbationReport r = perturbation_check(y, e, 3);
      if (!(r.rho < rho_star())) continue;
      ++tested;
      Eigen::JacobiSVD<CMatrix> a(y, Eigen::ComputeFullU), b(y + e, Eigen::ComputeFullU);
      const double sine = oracle::largest_angle_sine(a.matrixU().rightCols(7), b.matrixU().rightCols(7));
      const double dist = 2.0 * std::sin(0.5 * std::asin(std::min(1.0, sine)));
      CHECK(r.subspace_distance == doctest::Approx(dist).epsilon(1e-8));
      CHECK(dist <= 2 * r.rho * (1 - r.rho) / ((1 - 2 * r.rho) * (1 - 2 * r.rho)));
    }
    CHECK(tested > 20);
  }
  SUBCASE("spectral separation just below one fifth") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      CMatrix e = 1e-3 * oracle::random_complex(10, 10, seed);
      // Rescale until rho lands just under 1/5 (rho is not linear in the scale).
      for (int it = 0; it < 8; ++it) e *= 0.199 / perturbation_check(y, e, 3).rho;
      const PerturbationReport r = perturbation_check(y, e, 3);
      if (std::abs(r.rho - 0.199) > 0.002) continue;
      CHECK(r.signal_min > r.noise_max);
      return;
    }
    FAIL("no instance with rho near 0.2");
  }
}

TEST_CASE("budget entries") {
  const Grid g = Grid::planar(4, 10.0);
  SamplingOptions o;
  o.incident_count = 6;
  const auto sch = draw_directions(6, SamplingKind::planar_fourier_directions, 3, o);
  const SensingPair full = farfield_pair(g, sch);
  const Scene s = draw_scene(g, 2, {}, 5);
  const CMatrix e = 1e-4 * oracle::random_complex(6, 6, 1);
  const StabilityBudget b = compute_budget(full.phi_ext, full.psi_ext, s, e);
  CHECK(b.s == 2);
  CHECK(b.rho_star == doctest::Approx(rho_star()));
  CHECK(b.threshold_fixed == doctest::Approx(5.12));
  CHECK(b.sigma_min >= b.sigma_min_bound_scattering - 1e-12);
  CHECK(b.e_norm <= b.error_bound_scattering + 1e-12);
  CHECK(b.e_norm <= b.error_bound_general + 1e-12);
  CHECK_FALSE(b.entries.empty());
  // The first five entries are bounds; the rest are admissibility conditions.
  REQUIRE(b.entries.size() >= 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK_MESSAGE(b.entries[i].satisfied, b.entries[i].name);
}

}  // TEST_SUITE
