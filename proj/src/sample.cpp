#include "sga/sample.hpp"

#include "sga/errors.hpp"

namespace sga {

namespace fs = std::filesystem;

void save_sample(const AlignmentSample& s, const fs::path& dir) {
  fs::create_directories(dir);
  save_graph(s.graph_a, dir / "a.json");
  save_graph(s.graph_b, dir / "b.json");
  GroundTruthFile f{s.gt, s.overlap_ratio, s.task, s.seed, s.a_to_b};
  write_json_file(ground_truth_to_json(f), dir / "gt.json");
}

AlignmentSample load_sample(const fs::path& dir, const EdgeParams& edge_params) {
  AlignmentSample s;
  s.graph_a = load_graph(dir / "a.json", edge_params);
  s.graph_b = load_graph(dir / "b.json", edge_params);
  GroundTruthFile f = ground_truth_from_json(read_json_file(dir / "gt.json"));
  s.gt = std::move(f.gt);
  s.overlap_ratio = f.overlap;
  s.task = f.task;
  s.seed = f.seed.value_or(0);
  s.a_to_b = f.a_to_b;
  const auto problems = validate_ground_truth(s.gt, s.graph_a, s.graph_b);
  if (!problems.empty()) throw LoadError(dir.string() + ": " + problems.front());
  return s;
}

}  // namespace sga
