#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "sparsemusic/scene.hpp"

using namespace sparsemusic;

TEST_SUITE("scene") {

TEST_CASE("planar grid enumerates the lattice in index order") {
  const Grid g = Grid::planar(2, 10.0);
  REQUIRE(g.size() == 4);
  const std::vector<Vec3> expect = {{10, 10, 0}, {10, 20, 0}, {20, 10, 0}, {20, 20, 0}};
  for (std::size_t j = 0; j < 4; ++j) CHECK((g.point(j) - expect[j]).norm() == doctest::Approx(0.0));
  CHECK(g.index(2, 1) == 2);
}

TEST_CASE("planar grid extent and centering") {
  const Grid g = Grid::planar(50, 10.0);
  CHECK(g.size() == 2500);
  auto [lo, hi] = g.extent();
  CHECK(lo.x() == doctest::Approx(10.0));
  CHECK(hi.y() == doctest::Approx(500.0));
  for (std::size_t j = 0; j < g.size(); j += 97) {
    const Vec3 shifted = g.point(j) - Vec3(260, 260, 0);
    CHECK(shifted.x() >= -250.0);
    CHECK(shifted.x() <= 250.0);
  }
  const Grid c = Grid::planar(51, 10.0, GridCentering::centered);
  auto [clo, chi] = c.extent();
  CHECK(clo.x() == doctest::Approx(-250.0));
  CHECK(chi.x() == doctest::Approx(250.0));
  CHECK(c.size() == 2601);
}

TEST_CASE("single point grid") {
  const Grid g = Grid::planar(1, 10.0);
  CHECK(g.size() == 1);
  CHECK(g.index(1, 1) == 0);
}

TEST_CASE("grid rejects bad spacing") {
  CHECK_THROWS_AS(Grid::planar(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::planar(3, -1.0), std::invalid_argument);
}

TEST_CASE("index bijection round trips") {
  const Grid g = Grid::planar(7, 3.0, GridCentering::centered);
  for (std::size_t j = 0; j < g.size(); ++j) {
    auto [p1, p2] = g.lattice_coords(j);
    CHECK(g.index(p1, p2) == j);
  }
}

TEST_CASE("empty scene flags undefined amplitude range") {
  const Grid g = Grid::planar(4, 10.0);
  const Scene s = draw_scene(g, 0, {}, 5);
  CHECK(s.support.empty());
  CHECK_FALSE(s.xi_min().has_value());
  CHECK_FALSE(s.xi_max().has_value());
}

TEST_CASE("drawn amplitudes stay in range") {
  const Grid g = Grid::planar(20, 10.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene s = draw_scene(g, 10, {}, seed);
    REQUIRE(s.sparsity() == 10);
    CHECK(*s.xi_max() / *s.xi_min() <= 2.0);
    CHECK(std::set<std::size_t>(s.support.begin(), s.support.end()).size() == 10);
    CHECK(std::is_sorted(s.support.begin(), s.support.end()));
    for (const cplx& a : s.amplitudes) {
      CHECK(a.imag() == 0.0);
      CHECK(a.real() >= 1.0);
      CHECK(a.real() <= 2.0);
    }
  }
}

TEST_CASE("scene draws are deterministic") {
  const Grid g = Grid::planar(4, 10.0);
  const Scene a = draw_scene(g, 3, {}, 42);
  const Scene b = draw_scene(g, 3, {}, 42);
  CHECK(a.support == b.support);
  CHECK(a.amplitudes == b.amplitudes);
  CHECK_THROWS_AS(draw_scene(g, 17, {}, 1), std::invalid_argument);
}

TEST_CASE("planar directions") {
  CHECK((planar_direction(Vec2(0, 0)) - Vec3(0, 0, 1)).norm() < 1e-15);
  const Vec3 d = planar_direction(Vec2(1, 1));
  CHECK((d - Vec3(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0)).norm() < 1e-15);
  CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("drawn directions have unit norm") {
  SamplingOptions o;
  o.incident_count = 7;
  for (SamplingKind k : {SamplingKind::planar_fourier_directions, SamplingKind::far_field_directions}) {
    const SamplingScheme sch = draw_directions(100, k, 9, o);
    CHECK(sch.n() == 100);
    CHECK(sch.m() == 7);
    for (const Vec3& v : sch.sampling) CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    for (const Vec3& v : sch.incident) CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  }
  const SamplingScheme pf = draw_directions(50, SamplingKind::planar_fourier_directions, 3, o);
  for (const Vec2& a : pf.planar_params) CHECK(a.cwiseAbs().maxCoeff() <= 1.0);
  CHECK_THROWS(draw_directions(0, SamplingKind::planar_fourier_directions, 1, o));
}

TEST_CASE("scheme draws are deterministic") {
  SamplingOptions o;
  o.incident_count = 3;
  const auto a = draw_directions(10, SamplingKind::far_field_directions, 77, o);
  const auto b = draw_directions(10, SamplingKind::far_field_directions, 77, o);
  for (std::size_t k = 0; k < 10; ++k) CHECK(a.sampling[k] == b.sampling[k]);
  const auto p = draw_directions(20, SamplingKind::paraxial_sensors, 3, o);
  for (const Vec3& v : p.sampling) {
    CHECK(std::abs(v.x()) <= 50.0);
    CHECK(v.z() == 10000.0);
  }
}

TEST_CASE("zero noise leaves data unchanged") {
  const CMatrix y = oracle::random_complex(5, 4, 1);
  const DataMatrix d = apply_noise(DataMatrix(y), NoiseSpec{}, 3);
  CHECK((d.y - y).norm() == 0.0);
  CHECK(d.epsilon_realized == 0.0);
}

TEST_CASE("uniform noise entries are bounded by sigma sqrt2 Ymax") {
  const CMatrix y = CMatrix::Ones(10, 10);
  NoiseSpec spec;
  spec.sigma = 0.1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DataMatrix d = apply_noise(DataMatrix(y), spec, seed);
    CHECK(d.noise.cwiseAbs().maxCoeff() <= 0.1 * std::sqrt(2.0) + 1e-15);
    CHECK(d.epsilon_realized <= 0.1 * std::sqrt(2.0 * 100.0) + 1e-12);
    CHECK(d.epsilon_realized == doctest::Approx(spectral_norm(d.noise)));
  }
}

TEST_CASE("noise mean magnitude matches the uniform complex model") {
  // E|e1 + i e2| for e1, e2 uniform on [-1,1]: (sqrt2 + asinh(1)) / 3.
  const double expect = (std::sqrt(2.0) + std::asinh(1.0)) / 3.0;
  const CMatrix y = CMatrix::Ones(100, 100);
  NoiseSpec spec;
  spec.sigma = 1.0;
  const DataMatrix d = apply_noise(DataMatrix(y), spec, 11);
  const double mean = d.noise.cwiseAbs().mean();
  CHECK(std::abs(mean - expect) / expect < 0.05);
}

TEST_CASE("snr proxy at sigma 1.5") {
  // SNR ~ 1 / (2 sigma^2): mean |e|^2 of the uniform complex draw is 2/3.
  const double sigma = 1.5;
  CHECK(0.5 / (sigma * sigma) == doctest::Approx(0.2222).epsilon(1e-3));
  const CMatrix y = CMatrix::Ones(60, 60);
  NoiseSpec spec;
  spec.sigma = sigma;
  const DataMatrix d = apply_noise(DataMatrix(y), spec, 2);
  const double snr = 1.0 / d.noise.cwiseAbs2().mean();
  CHECK(snr == doctest::Approx(1.0 / (sigma * sigma * 2.0 / 3.0)).epsilon(0.05));
}

TEST_CASE("noise is deterministic in the seed") {
  const CMatrix y = oracle::random_complex(6, 6, 4);
  NoiseSpec spec;
  spec.sigma = 0.3;
  CHECK(apply_noise(DataMatrix(y), spec, 8).y == apply_noise(DataMatrix(y), spec, 8).y);
  CHECK(apply_noise(DataMatrix(y), spec, 8).y != apply_noise(DataMatrix(y), spec, 9).y);
}

}  // TEST_SUITE
