#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sparsemusic/analysis.hpp"
#include "sparsemusic/scene.hpp"
#include "sparsemusic/solvers.hpp"
#include "sparsemusic/types.hpp"

namespace sparsemusic {

using Json = nlohmann::json;

inline constexpr const char* kSceneFormat = "scene/v1";
inline constexpr char kMatrixMagic[8] = {'S', 'M', 'M', 'A', 'T', '0', '0', '1'};

// Binary container: 8-byte magic, u64 rows, u64 cols (little endian), then
// complex128 entries row-major as (re, im) pairs.
void write_matrix_binary(const std::string& path, const CMatrix& m);
CMatrix read_matrix_binary(const std::string& path);
// row,col,re,im
void write_matrix_csv(const std::string& path, const CMatrix& m);

Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);
Json vector_to_json(const CVector& v);
CVector vector_from_json(const Json& j);

Json grid_to_json(const Grid& grid);
Grid grid_from_json(const Json& j);
Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j, const Grid& grid);
Json scheme_to_json(const SamplingScheme& scheme);
SamplingScheme scheme_from_json(const Json& j);

// {"format": "scene/v1", "grid": ..., "scene": ..., "scheme": ...}
struct SceneBundle {
  Grid grid;
  Scene scene;
  std::optional<SamplingScheme> scheme;
};
Json bundle_to_json(const Grid& grid, const Scene& scene, const SamplingScheme* scheme = nullptr);
SceneBundle bundle_from_json(const Json& j);

Json problem_to_json(const SparseProblem& p);
SparseProblem problem_from_json(const Json& j);
Json solution_to_json(const SparseSolution& s);
SparseSolution solution_from_json(const Json& j);

Json ric_to_json(const RicEstimate& r);
Json budget_to_json(const StabilityBudget& b);
Json perturbation_to_json(const PerturbationReport& r);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sparsemusic
