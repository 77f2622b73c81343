#include "helpers.hpp"
#include "popbm/certifier.hpp"
#include "popbm/oracle.hpp"

using namespace popbm;
using testutil::inst;
using testutil::match;

namespace {

// a1-h1 non-matching rank q1, h1-a2 matching q1, a2-h2 non-matching q2,
// h2-a3 matching q2; the workhorse chain for the path detectors
Instance chain(int q1, int q2) {
  InstanceBuilder b;
  b.add_agent("a1", 1).add_agent("a2", 1).add_agent("a3", 1);
  b.add_house("h1", 1).add_house("h2", 1);
  b.add_edge("a1", "h1", q1);
  b.add_edge("a2", "h1", q1);
  b.add_edge("a2", "h2", q2);
  b.add_edge("a3", "h2", q2);
  return b.build();
}

}  // namespace

TEST_CASE("find_even_paths follows equal-rank continuations") {
  SUBCASE("unmatched house: only the first house is reachable") {
    Instance in = inst("agent a1 1\nhouse h1 1\nedge a1 h1 1\n");
    BMatching m = validate_matching(in, {});
    EvenPathReach r = find_even_paths(in, m, 0);
    REQUIRE(r.house_path[0].has_value());
    CHECK(*r.house_path[0] == std::vector<int>{0});
    for (const auto& p : r.agent_path) CHECK_FALSE(p.has_value());
  }
  SUBCASE("equal ranks reach across the chain") {
    Instance in = chain(1, 1);
    BMatching m = match(in, "a2 h1; a3 h2");
    EvenPathReach r = find_even_paths(in, m, in.find_edge(0, 0));
    CHECK(r.house_path[in.house_index("h1")].has_value());
    CHECK(r.agent_path[in.agent_index("a2")].has_value());
    CHECK(r.house_path[in.house_index("h2")].has_value());
  }
  SUBCASE("a rank change at the interior agent stops the path") {
    Instance in = chain(1, 2);
    BMatching m = match(in, "a2 h1; a3 h2");
    EvenPathReach r = find_even_paths(in, m, in.find_edge(0, 0));
    CHECK(r.house_path[in.house_index("h1")].has_value());
    CHECK(r.agent_path[in.agent_index("a2")].has_value());
    CHECK_FALSE(r.house_path[in.house_index("h2")].has_value());
  }
  SUBCASE("a matching start edge is rejected") {
    Instance in = inst("agent a1 1\nhouse h1 1\nedge a1 h1 1\n");
    BMatching m = match(in, "a1 h1");
    CHECK_THROWS_AS(find_even_paths(in, m, 0), Error);
  }
}

TEST_CASE("detect_witness TYPE3") {
  SUBCASE("unmatched agent beside an unsaturated house") {
    Instance in = inst("agent a 1\nhouse h 1\nedge a h 1\n");
    BMatching m = validate_matching(in, {});
    auto w = detect_witness(in, m, WitnessKind::TYPE3);
    REQUIRE(w.has_value());
    CHECK(w->kind == WitnessKind::TYPE3);
    CHECK(w->path == std::vector<int>{0});
    CHECK_FALSE(w->aux_edge.has_value());
    testutil::check_witness_beats(in, m, *w, VerifyMode::WEAK);
  }
  SUBCASE("saturated agent with a strictly worse matched edge carries it as aux") {
    Instance in = inst("agent a 1\nhouse h1 1\nhouse h2 1\nedge a h1 1\nedge a h2 2\n");
    BMatching m = match(in, "a h2");
    auto w = detect_witness(in, m, WitnessKind::TYPE3);
    REQUIRE(w.has_value());
    CHECK(w->path == std::vector<int>{in.find_edge(0, 0)});
    REQUIRE(w->aux_edge.has_value());
    CHECK(*w->aux_edge == in.find_edge(0, 1));
    BMatching better = apply_witness(in, m, *w);
    PopularityComparison c = more_popular(in, better, m);
    CHECK(c.prefer_first == 1);
    CHECK(c.prefer_second == 0);
  }
}

TEST_CASE("detect_witness TYPE1 on the two-step chain") {
  Instance in = chain(2, 1);
  BMatching m = match(in, "a2 h1; a3 h2");
  auto w = detect_witness(in, m, WitnessKind::TYPE1);
  REQUIRE(w.has_value());
  CHECK(w->path.size() == 4);
  BMatching better = apply_witness(in, m, *w);
  PopularityComparison c = more_popular(in, better, m);
  CHECK(c.prefer_first == 2);
  CHECK(c.prefer_second == 1);
  testutil::check_witness_beats(in, m, *w, VerifyMode::WEAK);
}

TEST_CASE("detect_witness TYPE4 closes a cycle at the start agent") {
  // a holds h2 at rank 2 while b sits on a's rank-1 house; the cycle
  // (a,h1),(h1,b),(b,h2),(h2,a) swaps everyone one notch better for a
  Instance loop = inst(
      "agent a 1\nagent b 1\nhouse h1 1\nhouse h2 1\n"
      "edge a h1 1\nedge a h2 2\nedge b h1 1\nedge b h2 1\n");
  BMatching m = match(loop, "a h2; b h1");
  auto w = detect_witness(loop, m, WitnessKind::TYPE4);
  REQUIRE(w.has_value());
  CHECK(w->path.size() == 4);
  CHECK(loop.edge(w->path.front()).rank < loop.edge(w->path.back()).rank);
  CHECK_FALSE(w->aux_edge.has_value());
  testutil::check_witness_beats(loop, m, *w, VerifyMode::WEAK);
}

TEST_CASE("verify: order, modes and the weak/popular divergence") {
  SUBCASE("maximum matching on the single-edge instance holds in both modes") {
    Instance in = inst("agent a 1\nhouse h 1\nedge a h 1\n");
    BMatching m = match(in, "a h");
    CHECK(verify(in, m, VerifyMode::POPULAR).holds);
    CHECK(verify(in, m, VerifyMode::WEAK).holds);
  }
  SUBCASE("the rank-2 favourite fails both modes with a TYPE3 witness") {
    Instance in = inst("agent a 1\nhouse h1 1\nhouse h2 1\nedge a h1 1\nedge a h2 2\n");
    BMatching m = match(in, "a h2");
    VerifyResult pop = verify(in, m, VerifyMode::POPULAR);
    VerifyResult weak = verify(in, m, VerifyMode::WEAK);
    REQUIRE_FALSE(pop.holds);
    REQUIRE_FALSE(weak.holds);
    CHECK(pop.witness->kind == WitnessKind::TYPE3);
    CHECK(weak.witness->kind == WitnessKind::TYPE3);
    // agreement with the definitional oracle
    CHECK_FALSE(brute_check(in, m, OracleMode::POPULAR).holds);
    CHECK_FALSE(brute_check(in, m, OracleMode::WEAK).holds);
  }
  SUBCASE("a TYPE2-only failure holds weakly but not popularly") {
    Instance in = inst(
        "agent x 2\nagent y 1\nagent z 1\n"
        "house h1 1\nhouse h2 1\n"
        "edge x h1 1\nedge x h2 1\nedge y h1 1\nedge z h2 1\n");
    BMatching m = match(in, "x h1; x h2");
    VerifyResult weak = verify(in, m, VerifyMode::WEAK);
    CHECK(weak.holds);
    VerifyResult pop = verify(in, m, VerifyMode::POPULAR);
    REQUIRE_FALSE(pop.holds);
    CHECK(pop.witness->kind == WitnessKind::TYPE2);
    testutil::check_witness_beats(in, m, *pop.witness, VerifyMode::POPULAR);
    // both verdicts agree with the oracle
    CHECK(brute_check(in, m, OracleMode::WEAK).holds);
    CHECK_FALSE(brute_check(in, m, OracleMode::POPULAR).holds);
  }
}

TEST_CASE("apply_witness examples") {
  SUBCASE("TYPE3 without aux adds one edge") {
    Instance in = inst("agent a 1\nhouse h 1\nedge a h 1\n");
    BMatching m = validate_matching(in, {});
    auto w = detect_witness(in, m, WitnessKind::TYPE3);
    REQUIRE(w.has_value());
    BMatching better = apply_witness(in, m, *w);
    CHECK(better == match(in, "a h"));
  }
  SUBCASE("TYPE3 with aux swaps the worse edge out, winning 1-0") {
    Instance in = inst("agent a 1\nhouse h1 1\nhouse h2 1\nedge a h1 1\nedge a h2 2\n");
    BMatching m = match(in, "a h2");
    auto w = detect_witness(in, m, WitnessKind::TYPE3);
    REQUIRE(w.has_value());
    BMatching better = apply_witness(in, m, *w);
    CHECK(better == match(in, "a h1"));
    PopularityComparison c = more_popular(in, better, m);
    CHECK(c.prefer_first == 1);
    CHECK(c.prefer_second == 0);
  }
  SUBCASE("invalid witnesses are rejected") {
    Instance in = chain(2, 1);
    BMatching m = match(in, "a2 h1; a3 h2");
    auto w = detect_witness(in, m, WitnessKind::TYPE1);
    REQUIRE(w.has_value());
    Witness broken = *w;
    broken.kind = WitnessKind::TYPE3;  // wrong shape for the kind
    CHECK_THROWS_AS(apply_witness(in, m, broken), Error);
  }
}

TEST_CASE("verify is deterministic") {
  Instance in = chain(2, 1);
  BMatching m = match(in, "a2 h1; a3 h2");
  VerifyResult r1 = verify(in, m, VerifyMode::POPULAR);
  VerifyResult r2 = verify(in, m, VerifyMode::POPULAR);
  REQUIRE((r1.witness.has_value() && r2.witness.has_value()));
  CHECK(r1.witness->kind == r2.witness->kind);
  CHECK(r1.witness->path == r2.witness->path);
  CHECK(r1.witness->aux_edge == r2.witness->aux_edge);
}

TEST_CASE("witness serialization round trips") {
  SUBCASE("single path with aux") {
    Instance in = inst("agent a 1\nhouse h1 1\nhouse h2 1\nedge a h1 1\nedge a h2 2\n");
    BMatching m = match(in, "a h2");
    auto w = detect_witness(in, m, WitnessKind::TYPE3);
    REQUIRE(w.has_value());
    std::string text = witness_to_text(in, m, *w);
    CHECK(text ==
          "kind=3\n"
          "a h1 N rank=1\n"
          "aux: a h2 M rank=2\n");
    Witness back = parse_witness_text(in, m, text);
    CHECK(back.kind == w->kind);
    CHECK(back.path == w->path);
    CHECK(back.aux_edge == w->aux_edge);
  }
  SUBCASE("TYPE2 uses two path blocks") {
    Instance in = inst(
        "agent x 2\nagent y 1\nagent z 1\n"
        "house h1 1\nhouse h2 1\n"
        "edge x h1 1\nedge x h2 1\nedge y h1 1\nedge z h2 1\n");
    BMatching m = match(in, "x h1; x h2");
    auto w = detect_witness(in, m, WitnessKind::TYPE2);
    REQUIRE(w.has_value());
    std::string text = witness_to_text(in, m, *w);
    CHECK(text.find("path:\n") != std::string::npos);
    Witness back = parse_witness_text(in, m, text);
    CHECK(back.path == w->path);
    CHECK(back.second_path == w->second_path);
  }
  SUBCASE("flag disagreements are rejected") {
    Instance in = inst("agent a 1\nhouse h 1\nedge a h 1\n");
    BMatching m = validate_matching(in, {});
    CHECK_THROWS_AS(parse_witness_text(in, m, "kind=3\na h M rank=1\n"), Error);
    CHECK_THROWS_AS(parse_witness_text(in, m, "kind=3\na h N rank=2\n"), Error);
  }
}

TEST_CASE("verdicts agree with the oracle in both modes on random instances") {
  std::mt19937 rng(41);
  int pairs = 0;
  for (int it = 0; it < 25; ++it) {
    Instance in = testutil::random_instance(rng, 3, 3, 2, 2, 0.6);
    auto all = testutil::all_matchings(in);
    for (const auto& ids : all) {
      BMatching m = BMatching::unchecked(in, ids);
      ++pairs;
      CHECK(verify(in, m, VerifyMode::POPULAR).holds ==
            brute_check(in, m, OracleMode::POPULAR).holds);
      CHECK(verify(in, m, VerifyMode::WEAK).holds == brute_check(in, m, OracleMode::WEAK).holds);
    }
  }
  CHECK(pairs > 100);
}

TEST_CASE("a popular matching can fail weak popularity, and the certifier sees it") {
  Instance in = inst(
      "agent a1 1\nagent a2 1\nagent a3 2\n"
      "house h1 1\nhouse h2 1\nhouse h3 1\n"
      "edge a1 h3 1\nedge a2 h1 1\nedge a2 h2 1\n"
      "edge a3 h3 1\nedge a3 h1 2\nedge a3 h2 2\n");
  BMatching m = match(in, "a1 h3; a2 h2; a3 h1");
  CHECK(verify(in, m, VerifyMode::POPULAR).holds);
  VerifyResult weak = verify(in, m, VerifyMode::WEAK);
  REQUIRE_FALSE(weak.holds);
  REQUIRE(weak.witness.has_value());
  CHECK(weak.witness->kind == WitnessKind::TYPE1);
  testutil::check_witness_beats(in, m, *weak.witness, VerifyMode::WEAK);
  // both verdicts match the definitional oracle
  CHECK(brute_check(in, m, OracleMode::POPULAR).holds);
  CHECK_FALSE(brute_check(in, m, OracleMode::WEAK).holds);
}
