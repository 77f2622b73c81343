#include <benchmark/benchmark.h>

#include <random>

#include "popbm/certifier.hpp"
#include "popbm/matching.hpp"
#include "popbm/oracle.hpp"
#include "popbm/reductions.hpp"
#include "popbm/solvers.hpp"

namespace {

using namespace popbm;

Instance random_two_rank(std::mt19937& rng, int agents, int houses) {
  InstanceBuilder b;
  std::uniform_int_distribution<int> pick(1, houses);
  for (int a = 1; a <= agents; ++a) b.add_agent("a" + std::to_string(a), 2);
  for (int h = 1; h <= houses; ++h) b.add_house("h" + std::to_string(h), 1);
  for (int a = 1; a <= agents; ++a) {
    int h1 = pick(rng), h2 = pick(rng);
    while (h2 == h1) h2 = pick(rng);
    b.add_edge("a" + std::to_string(a), "h" + std::to_string(h1), 1);
    b.add_edge("a" + std::to_string(a), "h" + std::to_string(h2), 2);
  }
  return b.build();
}

X3CGadget twin_gadget() {
  X3CInstance x = parse_x3c_text(
      "element 1\nelement 2\nelement 3\nset T1 1 2 3\nset T2 1 2 3\n");
  return build_x3c_gadget(x);
}

void BM_MaxBMatching(benchmark::State& state) {
  std::mt19937 rng(1);
  Instance in = random_two_rank(rng, static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(0)));
  CapGraph g = CapGraph::whole(in);
  for (auto _ : state) {
    BMatching m = max_b_matching(g);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_MaxBMatching)->Arg(8)->Arg(32)->Arg(128);

void BM_VerifyPopular(benchmark::State& state) {
  X3CGadget g = twin_gadget();
  BMatching m = cover_to_matching(g, {"T1"});
  for (auto _ : state) {
    VerifyResult r = verify(g.instance, m, VerifyMode::POPULAR);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_VerifyPopular);

void BM_VerifyWeak(benchmark::State& state) {
  X3CGadget g = twin_gadget();
  BMatching m = cover_to_matching(g, {"T1"});
  for (auto _ : state) {
    VerifyResult r = verify(g.instance, m, VerifyMode::WEAK);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_VerifyWeak);

void BM_BruteCheck(benchmark::State& state) {
  std::mt19937 rng(2);
  Instance in = random_two_rank(rng, 5, 5);
  CapGraph g = CapGraph::whole(in);
  BMatching m = max_b_matching(g);
  for (auto _ : state) {
    OracleVerdict v = brute_check(in, m, OracleMode::WEAK);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_BruteCheck);

void BM_Enumerate(benchmark::State& state) {
  std::mt19937 rng(3);
  Instance in = random_two_rank(rng, static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(0)));
  for (auto _ : state) {
    long long count = 0;
    enumerate_b_matchings(in, [&](std::span<const int>) {
      ++count;
      return true;
    });
    benchmark::DoNotOptimize(count);
  }
}
BENCHMARK(BM_Enumerate)->Arg(5)->Arg(7);

void BM_AlgorithmA(benchmark::State& state) {
  std::mt19937 rng(4);
  Instance in = random_two_rank(rng, static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(0)));
  for (auto _ : state) {
    SolverReport r = algorithm_a(in);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_AlgorithmA)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
