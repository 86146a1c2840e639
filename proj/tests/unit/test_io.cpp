#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "sparsemusic/io.hpp"
#include "sparsemusic/rng.hpp"

using namespace sparsemusic;
namespace fs = std::filesystem;

TEST_SUITE("io") {

TEST_CASE("binary matrix round trip and header layout") {
  const fs::path f = fs::temp_directory_path() / "sparsemusic_io_test.bin";
  const CMatrix m = oracle::random_complex(3, 5, 1);
  write_matrix_binary(f.string(), m);
  CHECK(fs::file_size(f) == 8 + 16 + 3 * 5 * 16);
  const CMatrix back = read_matrix_binary(f.string());
  CHECK(back == m);
  std::ifstream in(f, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 8) == "SMMAT001");
  std::uint64_t rows = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  CHECK(rows == 3);
  double first[2];
  in.seekg(24);
  in.read(reinterpret_cast<char*>(first), 16);
  CHECK(first[0] == m(0, 0).real());
  CHECK(first[1] == m(0, 0).imag());
  in.read(reinterpret_cast<char*>(first), 16);
  CHECK(first[0] == m(0, 1).real());  // row-major
  fs::remove(f);
}

TEST_CASE("corrupt or missing matrix files are rejected") {
  const fs::path f = fs::temp_directory_path() / "sparsemusic_io_bad.bin";
  { std::ofstream(f) << "not a matrix"; }
  CHECK_THROWS(read_matrix_binary(f.string()));
  fs::remove(f);
  CHECK_THROWS(read_matrix_binary(f.string()));
}

TEST_CASE("scene bundle round trip") {
  const Grid g = Grid::planar(5, 10.0, GridCentering::centered);
  const Scene s = make_scene(g, {3, 11}, {cplx(1.5, 0.25), 2.0});
  SamplingOptions o;
  o.incident_count = 3;
  const SamplingScheme sch = draw_directions(4, SamplingKind::planar_fourier_directions, 0xFFFFFFFFFFFFULL, o);
  const Json j = bundle_to_json(g, s, &sch);
  CHECK(j.at("format") == "scene/v1");
  const SceneBundle b = bundle_from_json(Json::parse(j.dump()));
  CHECK(b.grid.size() == g.size());
  CHECK(b.scene.support == s.support);
  CHECK(b.scene.amplitudes == s.amplitudes);
  REQUIRE(b.scheme.has_value());
  CHECK(b.scheme->seed == sch.seed);
  for (std::size_t k = 0; k < 4; ++k) CHECK((b.scheme->sampling[k] - sch.sampling[k]).norm() < 1e-15);
  Json bad = j;
  bad["format"] = "scene/v0";
  CHECK_THROWS(bundle_from_json(bad));
}

TEST_CASE("problem and solution round trip") {
  SparseProblem p{oracle::random_complex(3, 4, 2), oracle::random_complex(3, 1, 3).col(0), 0.5};
  const SparseProblem q = problem_from_json(Json::parse(problem_to_json(p).dump()));
  CHECK(q.matrix == p.matrix);
  CHECK(q.data == p.data);
  CHECK(q.epsilon == 0.5);
  SparseSolution s;
  s.z_hat = oracle::random_complex(4, 1, 4).col(0);
  s.support = {1, 2};
  s.certified = true;
  s.iterations = 17;
  const SparseSolution t = solution_from_json(solution_to_json(s));
  CHECK(t.z_hat == s.z_hat);
  CHECK(t.support == s.support);
  CHECK(t.certified);
  CHECK(t.iterations == 17);
}

TEST_CASE("rng splitting is independent of parent consumption") {
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) b.next_u64();
  Rng ca = a.split(3), cb = b.split(3);
  for (int i = 0; i < 5; ++i) CHECK(ca.next_u64() == cb.next_u64());
  CHECK(a.split(3).next_u64() != a.split(4).next_u64());
  Rng u(1);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    mean += x / 20000;
  }
  CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

}  // TEST_SUITE
