// Times encode and allocation on a synthetic 25x25 pair. Not part of ctest.
#include "sga/pipeline.hpp"
#include "sga/synth.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numeric>

using namespace sga;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 20;
  SynthConfig c;
  c.n_objects_min = c.n_objects_max = 25;
  c.box_size = 10.0;
  const auto scene = generate_scene(c);
  std::vector<int> all(25);
  std::iota(all.begin(), all.end(), 0);
  const auto s = make_s2s_pair_from_crops(scene, all, all, c, 1);
  const auto w = init_weights(EncoderConfig{}, 0);

  double encode = 0.0, mnn = 0.0, mcf = 0.0;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    const auto ea = encode_graph(s.graph_a, w);
    const auto eb = encode_graph(s.graph_b, w);
    encode += ms_since(t0);
    AlignConfig ac;
    ac.allocator = AllocatorKind::mnn;
    t0 = std::chrono::steady_clock::now();
    align_encoded(ea, s.graph_a, eb, s.graph_b, ac);
    mnn += ms_since(t0);
    ac.allocator = AllocatorKind::mcf;
    t0 = std::chrono::steady_clock::now();
    align_encoded(ea, s.graph_a, eb, s.graph_b, ac);
    mcf += ms_since(t0);
  }
  std::printf("{\"reps\": %d, \"encode_pair_ms\": %.3f, \"match_mnn_ms\": %.3f, \"match_mcf_ms\": %.3f}\n",
              reps, encode / reps, mnn / reps, mcf / reps);
}
