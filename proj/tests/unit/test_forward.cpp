#include <doctest.h>

#include "oracles.hpp"
#include "sparsemusic/forward.hpp"

using namespace sparsemusic;

namespace {

double max_column_deviation(const CMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) worst = std::max(worst, std::abs(m.col(j).norm() - 1.0));
  return worst;
}

SamplingScheme paper_sensors(std::size_t n, std::uint64_t seed, double aperture = 100.0) {
  SamplingOptions o;
  o.wavenumber = 2.0 * kPi / 0.1;
  o.aperture = aperture;
  o.z0 = 10000.0;
  return draw_directions(n, SamplingKind::paraxial_sensors, seed, o);
}

}  // namespace

TEST_SUITE("forward") {

TEST_CASE("single direction gives unit-modulus entries") {
  const Grid g = Grid::planar(4, 10.0);
  SamplingOptions o;
  o.incident_count = 1;
  const auto sch = draw_directions(1, SamplingKind::planar_fourier_directions, 5, o);
  const SensingPair p = farfield_pair(g, sch);
  for (Eigen::Index j = 0; j < p.phi_ext.cols(); ++j) {
    CHECK(std::abs(p.phi_ext(0, j)) == doctest::Approx(1.0));
    CHECK(p.phi_ext.col(j).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("far-field pair matches a scalar evaluation and the partial Fourier form") {
  const Grid g = Grid::planar(6, 10.0);
  SamplingOptions o;
  o.incident_count = 5;
  const auto sch = draw_directions(8, SamplingKind::planar_fourier_directions, 13, o);
  const SensingPair p = farfield_pair(g, sch);
  const double w = sch.wavenumber;
  CHECK(w * 10.0 == doctest::Approx(std::sqrt(2.0) * kPi));
  const double nrm = 1.0 / std::sqrt(8.0);
  for (std::size_t k = 0; k < 8; ++k)
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Vec3& s = sch.sampling[k];
      const Vec3& r = g.point(j);
      const double dot = s.x() * r.x() + s.y() * r.y() + s.z() * r.z();
      const cplx direct = nrm * cplx(std::cos(w * dot), -std::sin(w * dot));
      CHECK(std::abs(p.phi_ext(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) - direct) < 1e-12);
      // Planar lattice at spacing l: w s.r = pi a . p with p the integer lattice vector.
      const Vec2 a = sch.planar_params[k];
      const Vec2 pv = r.head<2>() / 10.0;
      const cplx fourier = nrm * std::exp(cplx(0, -kPi * a.dot(pv)));
      CHECK(std::abs(p.phi_ext(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) - fourier) < 1e-10);
    }
  CHECK(max_column_deviation(p.phi_ext) < 1e-10);
  CHECK(max_column_deviation(p.psi_ext) < 1e-10);
}

TEST_CASE("paraxial factorization reassembles exactly") {
  const Grid g = Grid::planar(9, 10.0, GridCentering::centered);
  const SamplingScheme sch = paper_sensors(12, 4);
  const ParaxialFactors f = paraxial_factors(g, sch);
  const SensingPair p = paraxial_pair(g, sch);
  const CMatrix rebuilt = f.d1.asDiagonal() * f.a * f.d2.asDiagonal();
  CHECK((rebuilt - p.phi_ext).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index k = 0; k < f.d1.size(); ++k) CHECK(std::abs(f.d1(k)) == doctest::Approx(1.0));
  for (Eigen::Index j = 0; j < f.d2.size(); ++j) CHECK(std::abs(f.d2(j)) == doctest::Approx(1.0));
  CHECK(max_column_deviation(p.phi_ext) < 1e-10);
  const CMatrix x = oracle::random_complex(static_cast<Eigen::Index>(g.size()), 3, 5);
  for (Eigen::Index c = 0; c < 3; ++c)
    CHECK((p.phi_ext * x.col(c)).norm() ==
          doctest::Approx((f.a * f.d2.asDiagonal() * x.col(c)).norm()).epsilon(1e-12));
}

TEST_CASE("Rayleigh-matched paraxial factor is the partial Fourier matrix") {
  // A l / (lambda z0) = 1: the A factor becomes exp(-pi i a . p) with a = 2 x / A.
  const Grid g = Grid::planar(11, 10.0, GridCentering::centered);
  const SamplingScheme sch = paper_sensors(10, 21);
  CHECK(100.0 * 10.0 / (0.1 * 10000.0) == doctest::Approx(1.0));
  const ParaxialFactors f = paraxial_factors(g, sch);
  const double nrm = 1.0 / std::sqrt(10.0);
  for (std::size_t k = 0; k < 10; ++k)
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Vec2 a = 2.0 * sch.sampling[k].head<2>() / 100.0;
      const Vec2 pv = g.point(j).head<2>() / 10.0;
      const cplx expect = nrm * std::exp(cplx(0, -2.0 * kPi * a.dot(pv) / 2.0));
      CHECK(std::abs(f.a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) - expect) < 1e-9);
    }
}

TEST_CASE("paraxial origin entry") {
  const Grid g = Grid::from_points({Vec3(0, 0, 0)}, 1.0);
  const SamplingScheme sch = paraxial_scheme({Vec2(0, 0)}, 10000.0, 2 * kPi / 0.1, 100.0);
  const ParaxialFactors f = paraxial_factors(g, sch);
  CHECK(std::abs(f.d1(0) - 1.0) < 1e-15);
  CHECK(std::abs(f.d2(0) - 1.0) < 1e-15);
  CHECK(std::abs(f.a(0, 0) - 1.0) < 1e-15);
  SamplingScheme bad = sch;
  bad.z0 = 0.0;
  CHECK_THROWS_AS(paraxial_factors(g, bad), std::invalid_argument);
}

TEST_CASE("exact Green pair") {
  const double w = 2 * kPi / 0.1;
  SUBCASE("one sensor one point normalizes to a unit entry") {
    const Grid g = Grid::from_points({Vec3(3, 4, 0)}, 1.0);
    const auto sch = paraxial_scheme({Vec2(0, 0)}, 100.0, w, 10.0);
    const SensingPair p = exact_green_pair(g, sch);
    CHECK(std::abs(p.phi_ext(0, 0)) == doctest::Approx(1.0));
  }
  SUBCASE("inverse distance law") {
    const Vec3 s(0, 0, 100);
    CHECK(std::abs(green_function(s, Vec3(0, 0, 50), w)) ==
          doctest::Approx(2.0 * std::abs(green_function(s, Vec3(0, 0, 0), w))));
    CHECK_THROWS_AS(green_function(s, s, w), DomainError);
  }
  SUBCASE("close to paraxial at the experiment geometry") {
    // Central part of the grid, where the neglected quartic phase stays small.
    const Grid g = Grid::planar(11, 10.0, GridCentering::centered);
    const SamplingScheme sch = paper_sensors(20, 8);
    const SensingPair e = exact_green_pair(g, sch);
    const SensingPair q = paraxial_pair(g, sch);
    CHECK(max_column_deviation(e.phi_ext) < 1e-10);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < e.phi_ext.cols(); ++j) {
      const cplx align = e.phi_ext(0, j) / q.phi_ext(0, j);
      const CVector diff = e.phi_ext.col(j) - align * q.phi_ext.col(j);
      worst = std::max(worst, diff.cwiseAbs().maxCoeff() / q.phi_ext.col(j).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 0.01);
  }
}

TEST_CASE("data assembly") {
  const Grid g = Grid::planar(5, 10.0);
  SamplingOptions o;
  o.incident_count = 6;
  const auto sch = draw_directions(7, SamplingKind::planar_fourier_directions, 2, o);
  const SensingPair full = farfield_pair(g, sch);

  SUBCASE("empty object gives zero data") {
    const CMatrix y = assemble_extended(full, CVector::Zero(static_cast<Eigen::Index>(g.size())));
    CHECK(y.norm() == 0.0);
  }
  SUBCASE("single scatterer is a rank one outer product") {
    const Scene s = make_scene(g, {7}, {cplx(1.5, -0.5)});
    const SensingPair p = restrict_to(full, s.support);
    const DataMatrix d = assemble_data(p, s);
    const CMatrix expect = cplx(1.5, -0.5) * full.phi_ext.col(7) * full.psi_ext.col(7).adjoint();
    CHECK((d.y - expect).norm() < 1e-14);
    Eigen::JacobiSVD<CMatrix> svd(d.y);
    CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
  }
  SUBCASE("triple loop oracle") {
    const Scene s = draw_scene(g, 3, {1.0, 2.0, true}, 9);
    const DataMatrix d = assemble_data(restrict_to(full, s.support), s);
    for (Eigen::Index k = 0; k < d.y.rows(); ++k)
      for (Eigen::Index l = 0; l < d.y.cols(); ++l) {
        cplx acc = 0.0;
        for (std::size_t q = 0; q < 3; ++q) {
          const auto j = static_cast<Eigen::Index>(s.support[q]);
          acc += full.phi_ext(k, j) * s.amplitudes[q] * std::conj(full.psi_ext(l, j));
        }
        CHECK(std::abs(d.y(k, l) - acc) < 1e-12);
      }
  }
  SUBCASE("superposition over disjoint scenes") {
    const Scene a = make_scene(g, {1, 4}, {1.0, 2.0});
    const Scene b = make_scene(g, {10, 20}, {cplx(0, 1), 0.5});
    const Scene ab = make_scene(g, {1, 4, 10, 20}, {1.0, 2.0, cplx(0, 1), 0.5});
    const CMatrix ya = assemble_data(restrict_to(full, a.support), a).y;
    const CMatrix yb = assemble_data(restrict_to(full, b.support), b).y;
    const CMatrix yab = assemble_data(restrict_to(full, ab.support), ab).y;
    CHECK((ya + yb - yab).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rank equals sparsity on generic instances") {
    const Scene s = draw_scene(g, 4, {}, 31);
    const DataMatrix d = assemble_data(restrict_to(full, s.support), s);
    Eigen::JacobiSVD<CMatrix> svd(d.y);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-8 * sv(0);
    CHECK(rank == 4);
  }
}

TEST_CASE("Foldy-Lax") {
  const double w = 2 * kPi / 0.1;
  const Grid g = Grid::planar(5, 0.03, GridCentering::centered);
  const auto sch = paraxial_scheme({Vec2(0, 0), Vec2(5, 0), Vec2(0, 5), Vec2(-5, 3)}, 50.0, w, 20.0);
  const SensingPair born = exact_green_pair(g, sch);

  SUBCASE("single scatterer has no multiple scattering") {
    const Scene s = make_scene(g, {12}, {2.0});
    const FoldyLaxSystem fl = foldy_lax_solve(g, s, born, w);
    CHECK(fl.g(0, 0) == cplx(0.0));
    CHECK((fl.total_fields - fl.incident_fields).norm() < 1e-14);
  }
  SUBCASE("two scatterers match a direct 2x2 solve") {
    const Scene s = make_scene(g, {3, 17}, {cplx(1e-3, 0), cplx(2e-3, 1e-3)});
    const FoldyLaxSystem fl = foldy_lax_solve(g, s, born, w);
    CHECK(fl.g(0, 0) == cplx(0.0));
    CHECK(fl.g(1, 1) == cplx(0.0));
    const cplx g12 = green_function(g.point(3), g.point(17), w);
    // Physical incident field u^i_j = c_j * conj(psi) entries; solve by Cramer.
    const double c0 = born.column_norms(3), c1 = born.column_norms(17);
    const cplx a = 1.0, b = -w * w * g12 * s.amplitudes[1];
    const cplx c = -w * w * g12 * s.amplitudes[0], d = 1.0;
    const cplx det = a * d - b * c;
    for (Eigen::Index l = 0; l < fl.incident_fields.cols(); ++l) {
      const cplx f0 = c0 * fl.incident_fields(0, l), f1 = c1 * fl.incident_fields(1, l);
      const cplx u0 = (f0 * d - b * f1) / det, u1 = (a * f1 - c * f0) / det;
      CHECK(std::abs(u0 / c0 - fl.total_fields(0, l)) < 1e-10 * std::abs(u0 / c0));
      CHECK(std::abs(u1 / c1 - fl.total_fields(1, l)) < 1e-10 * std::abs(u1 / c1));
    }
    CHECK(fl.relative_residual <= 1e-10);
  }
  SUBCASE("Born limit is second order in the amplitude") {
    const Scene base = make_scene(g, {2, 9, 15, 22}, {1e-5, 2e-5, 1.5e-5, cplx(0, 1e-5)});
    std::vector<double> lt, le;
    for (double t : {1.0, 0.5, 0.25, 0.125}) {
      std::vector<cplx> amps;
      for (const cplx& a : base.amplitudes) amps.push_back(t * a);
      const Scene s = make_scene(g, base.support, amps);
      const SensingPair p = restrict_to(born, s.support);
      const FoldyLaxSystem fl = foldy_lax_solve(g, s, born, w);
      const double diff = spectral_norm(assemble_data(p, s, fl).y - assemble_data(p, s).y);
      lt.push_back(std::log(t));
      le.push_back(std::log(diff));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) mx += lt[i] / 4, my += le[i] / 4;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) sxy += (lt[i] - mx) * (le[i] - my), sxx += (lt[i] - mx) * (lt[i] - mx);
    CHECK(std::abs(sxy / sxx - 2.0) <= 0.1);
  }
}

TEST_CASE("extended object data reduces to point data") {
  const Grid g = Grid::planar(6, 10.0);
  SamplingOptions o;
  o.incident_count = 5;
  const auto sch = draw_directions(6, SamplingKind::planar_fourier_directions, 19, o);
  const SensingPair full = farfield_pair(g, sch);
  const Scene s = draw_scene(g, 4, {}, 3);
  const ExtendedObjectData e = extended_object_data(g, s, sch);
  const DataMatrix d = assemble_data(restrict_to(full, s.support), s);
  CHECK((e.data.y - d.y).cwiseAbs().maxCoeff() <= 1e-10 * d.y.cwiseAbs().maxCoeff());

  const Scene one = make_scene(g, {5}, {1.0});
  const ExtendedObjectData e1 = extended_object_data(g, one, sch);
  Eigen::JacobiSVD<CMatrix> svd(e1.data.y);
  CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));

  CHECK(indicator_transform(0.0, 0.0) == doctest::Approx(1.0 / (2 * kPi)));
  CHECK(indicator_transform(1e-9, -1e-9) == doctest::Approx(1.0 / (2 * kPi)));
}

}  // TEST_SUITE
