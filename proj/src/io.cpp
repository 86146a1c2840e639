#include "sparsemusic/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sparsemusic {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

// JSON has no infinity; encode non-finite numbers as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vec3(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Vec3 vec3_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("json: expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}
Json vec2(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Vec2 vec2_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("json: expected [a1, a2]");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}
Json cplx_json(cplx z) { return Json::array({z.real(), z.imag()}); }
cplx cplx_from(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("json: expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void write_matrix_binary(const std::string& path, const CMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMatrixMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(out, m(i, j).real());
      put_f64(out, m(i, j).imag());
    }
  if (!out) throw std::runtime_error("error writing " + path);
}

CMatrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open matrix file " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0)
    throw std::runtime_error(path + ": not a matrix container (bad magic)");
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (!in) throw std::runtime_error(path + ": truncated header");
  if (rows > (1ULL << 31) || cols > (1ULL << 31) || (rows && cols > (1ULL << 40) / rows))
    throw std::runtime_error(path + ": implausible matrix size");
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = get_f64(in);
      const double im = get_f64(in);
      m(i, j) = {re, im};
    }
  if (!in) throw std::runtime_error(path + ": truncated payload");
  return m;
}

void write_matrix_csv(const std::string& path, const CMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << i << ',' << j << ',' << m(i, j).real() << ',' << m(i, j).imag() << '\n';
  if (!out) throw std::runtime_error("error writing " + path);
}

Json matrix_to_json(const CMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols || re.size() != im.size())
    throw std::invalid_argument("json matrix: payload size does not match rows*cols");
  CMatrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c, ++k) m(i, c) = {re[k].get<double>(), im[k].get<double>()};
  return m;
}

Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(cplx_json(v(i)));
  return out;
}

CVector vector_from_json(const Json& j) {
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = cplx_from(j[i]);
  return v;
}

Json grid_to_json(const Grid& grid) {
  if (grid.is_planar_lattice()) {
    const bool centered = grid.offset().norm() > 0.0;
    return {{"type", "planar"},
            {"side", grid.side()},
            {"spacing", grid.spacing()},
            {"centering", centered ? "centered" : "first-quadrant"}};
  }
  Json pts = Json::array();
  for (const Vec3& p : grid.points()) pts.push_back(vec3(p));
  return {{"type", "points"}, {"spacing", grid.spacing()}, {"points", pts}};
}

Grid grid_from_json(const Json& j) {
  const std::string type = j.value("type", "planar");
  if (type == "planar") {
    const std::string c = j.value("centering", "first-quadrant");
    GridCentering centering;
    if (c == "centered") centering = GridCentering::centered;
    else if (c == "first-quadrant") centering = GridCentering::first_quadrant;
    else throw std::invalid_argument("grid: unknown centering '" + c + "'");
    return Grid::planar(j.at("side").get<std::size_t>(), j.at("spacing").get<double>(), centering);
  }
  if (type == "points") {
    std::vector<Vec3> pts;
    for (const auto& p : j.at("points")) pts.push_back(vec3_from(p));
    return Grid::from_points(std::move(pts), j.at("spacing").get<double>());
  }
  throw std::invalid_argument("grid: unknown type '" + type + "'");
}

Json scene_to_json(const Scene& scene) {
  Json amps = Json::array();
  for (cplx a : scene.amplitudes) amps.push_back(cplx_json(a));
  return {{"support", scene.support}, {"amplitudes", amps}};
}

Scene scene_from_json(const Json& j, const Grid& grid) {
  IndexSet support = j.at("support").get<IndexSet>();
  std::vector<cplx> amps;
  for (const auto& a : j.at("amplitudes")) amps.push_back(cplx_from(a));
  return make_scene(grid, std::move(support), std::move(amps));
}

Json scheme_to_json(const SamplingScheme& s) {
  Json j = {{"kind", to_string(s.kind)}, {"wavenumber", s.wavenumber}, {"aperture", s.aperture},
            {"z0", s.z0}, {"seed", s.seed}};
  if (s.kind == SamplingKind::planar_fourier_directions) {
    Json a = Json::array(), b = Json::array();
    for (const Vec2& p : s.planar_params) a.push_back(vec2(p));
    for (const Vec2& p : s.incident_params) b.push_back(vec2(p));
    j["planar_params"] = a;
    j["incident_params"] = b;
  } else if (s.kind == SamplingKind::time_samples) {
    j["times"] = s.times;
    j["tones"] = s.tone_count;
  } else {
    Json a = Json::array(), b = Json::array();
    for (const Vec3& p : s.sampling) a.push_back(vec3(p));
    for (const Vec3& p : s.incident) b.push_back(vec3(p));
    j["sampling"] = a;
    j["incident"] = b;
  }
  return j;
}

SamplingScheme scheme_from_json(const Json& j) {
  SamplingScheme s;
  s.kind = sampling_kind_from_string(j.at("kind").get<std::string>());
  s.wavenumber = j.value("wavenumber", 0.0);
  s.aperture = j.value("aperture", 0.0);
  s.z0 = j.value("z0", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  if (s.kind == SamplingKind::planar_fourier_directions) {
    std::vector<Vec2> a, b;
    for (const auto& p : j.at("planar_params")) a.push_back(vec2_from(p));
    if (j.contains("incident_params"))
      for (const auto& p : j.at("incident_params")) b.push_back(vec2_from(p));
    SamplingScheme out = planar_fourier_scheme(std::move(a), std::move(b), s.wavenumber);
    out.seed = s.seed;
    return out;
  }
  if (s.kind == SamplingKind::time_samples) {
    s.times = j.at("times").get<std::vector<long>>();
    s.tone_count = j.at("tones").get<std::size_t>();
    return s;
  }
  for (const auto& p : j.at("sampling")) {
    Vec3 v = vec3_from(p);
    if (s.kind == SamplingKind::far_field_directions && std::abs(v.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("scheme: far-field directions must have unit norm");
    s.sampling.push_back(v);
  }
  if (j.contains("incident"))
    for (const auto& p : j.at("incident")) s.incident.push_back(vec3_from(p));
  if (s.sampling.empty()) throw std::invalid_argument("scheme: no sampling points");
  return s;
}

Json bundle_to_json(const Grid& grid, const Scene& scene, const SamplingScheme* scheme) {
  Json j = {{"format", kSceneFormat}, {"grid", grid_to_json(grid)}, {"scene", scene_to_json(scene)}};
  if (scheme) j["scheme"] = scheme_to_json(*scheme);
  return j;
}

SceneBundle bundle_from_json(const Json& j) {
  const std::string fmt = j.value("format", "");
  if (fmt != kSceneFormat)
    throw std::invalid_argument("scene file: expected format \"" + std::string(kSceneFormat) +
                                "\", got \"" + fmt + "\"");
  Grid grid = grid_from_json(j.at("grid"));
  Scene scene = scene_from_json(j.at("scene"), grid);
  SceneBundle b{std::move(grid), std::move(scene), std::nullopt};
  if (j.contains("scheme")) b.scheme = scheme_from_json(j.at("scheme"));
  return b;
}

Json problem_to_json(const SparseProblem& p) {
  return {{"matrix", matrix_to_json(p.matrix)}, {"data", vector_to_json(p.data)}, {"epsilon", p.epsilon}};
}

SparseProblem problem_from_json(const Json& j) {
  SparseProblem p;
  p.matrix = matrix_from_json(j.at("matrix"));
  p.data = vector_from_json(j.at("data"));
  p.epsilon = j.value("epsilon", 0.0);
  if (p.data.size() != p.matrix.rows())
    throw std::invalid_argument("problem: data length does not match matrix rows");
  return p;
}

Json solution_to_json(const SparseSolution& s) {
  return {{"z_hat", vector_to_json(s.z_hat)}, {"objective", s.objective}, {"residual", s.residual},
          {"iterations", s.iterations}, {"converged", s.converged}, {"support", s.support},
          {"tie", s.tie},
          {"certified", s.certified}};
}

SparseSolution solution_from_json(const Json& j) {
  SparseSolution s;
  s.z_hat = vector_from_json(j.at("z_hat"));
  s.objective = j.at("objective").get<double>();
  s.residual = j.at("residual").get<double>();
  s.iterations = j.at("iterations").get<std::size_t>();
  s.converged = j.at("converged").get<bool>();
  s.support = j.at("support").get<IndexSet>();
  s.tie = j.value("tie", false);
  s.certified = j.value("certified", false);
  return s;
}

Json ric_to_json(const RicEstimate& r) {
  return {{"order", r.order}, {"delta_minus", r.delta_minus}, {"delta_plus", r.delta_plus},
          {"method", to_string(r.method)}, {"witness_minus", r.witness_minus},
          {"witness_plus", r.witness_plus}};
}

Json budget_to_json(const StabilityBudget& b) {
  Json entries = Json::array();
  for (const auto& e : b.entries)
    entries.push_back({{"name", e.name}, {"measured", num(e.measured)}, {"bound", num(e.bound)},
                       {"satisfied", e.satisfied}});
  Json j = {{"s", b.s},
            {"gamma", num(b.gamma)},
            {"gamma_lower_bound", num(b.gamma_lower)},
            {"gamma_lower_vacuous", b.gamma_lower_vacuous},
            {"delta_margin", num(b.delta_margin)},
            {"delta_margin_lower", num(b.delta_margin_lower)},
            {"rho", num(b.rho)},
            {"rho_star", num(b.rho_star)},
            {"sigma_min", num(b.sigma_min)},
            {"epsilon", num(b.epsilon)},
            {"zeta_min", num(b.zeta_min)},
            {"zeta_max", num(b.zeta_max)},
            {"xi_min", num(b.xi_min)},
            {"xi_max", num(b.xi_max)},
            {"dynamic_range", num(b.dynamic_range)},
            {"ric_s", ric_to_json(b.ric_s)},
            {"ric_s1", ric_to_json(b.ric_s1)},
            {"thresholds", {{"gamma", num(b.threshold_gamma)}, {"ric", num(b.threshold_ric)},
                            {"fixed", b.threshold_fixed}}},
            {"bounds", entries}};
  if (b.gamma_ell >= 0.0) {
    j["gamma_ell"] = num(b.gamma_ell);
    j["delta_margin_ell"] = num(b.delta_margin_ell);
  }
  return j;
}

Json perturbation_to_json(const PerturbationReport& r) {
  return {{"blocks", {num(r.e11), num(r.e12), num(r.e21), num(r.e22)}},
          {"e_norm", num(r.e_norm)},
          {"sigma_min", num(r.sigma_min)},
          {"rho", num(r.rho)},
          {"condition_205", num(r.condition_205)},
          {"condition_205_met", r.condition_205_met},
          {"bounds", Json::array({
               {{"name", "f_norm"}, {"measured", num(r.f_norm)}, {"bound", num(r.f_bound)},
                {"satisfied", r.f_norm <= r.f_bound}},
               {{"name", "subspace_distance"}, {"measured", num(r.subspace_distance)},
                {"bound", num(r.distance_bound)}, {"satisfied", r.subspace_distance <= r.distance_bound}},
           })},
          {"gap_metric", num(r.gap_metric)},
          {"basis_distance", num(r.basis_distance)},
          {"below_rho_star", r.below_rho_star},
          {"signal_min", num(r.signal_min)},
          {"noise_max", num(r.noise_max)}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("error writing " + path);
}

}  // namespace sparsemusic
