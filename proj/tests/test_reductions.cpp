#include "helpers.hpp"
#include "popbm/reductions.hpp"

using namespace popbm;

namespace {

X3CInstance x3c(const std::string& text) { return parse_x3c_text(text); }

const char* kThreeOne = "element 1\nelement 2\nelement 3\nset T1 1 2 3\n";
const char* kThreeTwo = "element 1\nelement 2\nelement 3\nset T1 1 2 3\nset T2 1 2 3\n";

}  // namespace

TEST_CASE("build_x3c_gadget sizes and wiring") {
  SUBCASE("|K|=3, m=1: five agents, five houses, no spare houses") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeOne));
    CHECK(g.instance.agent_count() == 5);
    CHECK(g.instance.house_count() == 5);
    CHECK(g.g_houses.empty());
    CHECK(g.instance.max_rank() == 2);
  }
  SUBCASE("|K|=3, m=2: ten agents, eight houses, one spare") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
    CHECK(g.instance.agent_count() == 10);
    CHECK(g.instance.house_count() == 8);
    CHECK(g.g_houses.size() == 1);
  }
  SUBCASE("an element in two triples has two rank-1 edges at its house") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
    int v1 = g.element_house[0];
    int rank1 = 0;
    for (int e : g.instance.house_edges(v1))
      if (g.instance.edge(e).rank == 1) ++rank1;
    CHECK(rank1 == 2);
  }
  SUBCASE("structural caps: two ranks, agent capacity at most 2, houses 1") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
    int max_agent_cap = 0;
    for (int a = 0; a < g.instance.agent_count(); ++a)
      max_agent_cap = std::max(max_agent_cap, g.instance.agent_capacity(a));
    CHECK(max_agent_cap == 2);
    for (int h = 0; h < g.instance.house_count(); ++h)
      CHECK(g.instance.house_capacity(h) == 1);
    CHECK(g.instance.max_rank() == 2);
  }
  SUBCASE("malformed inputs are rejected") {
    X3CInstance few = x3c("element 1\nelement 2\nelement 3\n");  // m < |K|/3
    CHECK_THROWS_AS(build_x3c_gadget(few), Error);
  }
}

TEST_CASE("cover_to_matching") {
  SUBCASE("a cover of the single-triple instance matches five slots") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeOne));
    BMatching m = cover_to_matching(g, {"T1"});
    CHECK(m.size() == 5);
    CHECK(verify(g.instance, m, VerifyMode::POPULAR).holds);
    CHECK(brute_check(g.instance, m, OracleMode::POPULAR).holds);
  }
  SUBCASE("non-cover triples occupy the spare houses in index order") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
    BMatching m = cover_to_matching(g, {"T1"});
    CHECK(m.contains(g.instance.find_edge(g.set_agents[1][4], g.g_houses[0])));
    CHECK(verify(g.instance, m, VerifyMode::POPULAR).holds);
  }
  SUBCASE("a non-exact cover is rejected") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
    CHECK_THROWS_AS(cover_to_matching(g, {"T1", "T2"}), Error);  // double cover
    CHECK_THROWS_AS(cover_to_matching(g, {}), Error);            // nothing covered
    CHECK_THROWS_AS(cover_to_matching(g, {"T9"}), Error);        // unknown name
  }
}

TEST_CASE("matching_to_cover") {
  SUBCASE("round trip recovers the cover") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
    BMatching m = cover_to_matching(g, {"T2"});
    CHECK(matching_to_cover(g, m) == std::vector<std::string>{"T2"});
  }
  SUBCASE("an oracle-found popular matching of the twin instance yields a cover") {
    X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
    auto popular = testutil::find_certified(g.instance, VerifyMode::POPULAR);
    REQUIRE(popular.has_value());
    auto cover = matching_to_cover(g, *popular);
    CHECK(cover.size() == 1);  // either {T1} or {T2}
  }
}

TEST_CASE("build_3sat_gadget sizes and wiring") {
  SUBCASE("single clause over three variables") {
    CnfFormula f = parse_dimacs_text("p cnf 3 1\n1 -2 3 0\n");
    SatGadget g = build_3sat_gadget(f);
    CHECK(g.instance.agent_count() == 9);   // 6 variable + 3 clause agents
    CHECK(g.instance.house_count() == 13);  // 12 variable houses + 1 clause house
    CHECK(g.instance.max_rank() == 3);
    CHECK_FALSE(g.instance.has_ties());
  }
  SUBCASE("a variable with uneven polarity counts uses the maximum") {
    CnfFormula f = parse_dimacs_text("p cnf 2 2\n1 1 -2 0\n1 -2 -2 0\n");
    // r(1)=max(3,0)=3, r(2)=max(0,3)=3
    SatGadget g = build_3sat_gadget(f);
    CHECK(g.r == std::vector<int>{3, 3});
    CnfFormula f2 = parse_dimacs_text("p cnf 2 2\n1 1 2 0\n-1 2 2 0\n");
    // r(1)=max(2,1)=2: 4 agents, 8 houses for the variable
    SatGadget g2 = build_3sat_gadget(f2);
    CHECK(g2.r[0] == 2);
    CHECK(g2.var_agents[0].size() == 4);
    CHECK(g2.p_houses[0].size() + g2.pp_houses[0].size() + g2.b_houses[0].size() +
              g2.g_houses[0].size() ==
          8);
  }
  SUBCASE("occurrence wiring is injective") {
    CnfFormula f = parse_dimacs_text("p cnf 1 1\n1 1 1 0\n");
    SatGadget g = build_3sat_gadget(f);
    std::vector<int> occ(g.occ_house[0].begin(), g.occ_house[0].end());
    std::sort(occ.begin(), occ.end());
    CHECK(std::adjacent_find(occ.begin(), occ.end()) == occ.end());
    // no p/p' occurrence house serves two clause agents
    std::vector<int> occ_houses;
    for (const auto& ph : g.p_houses) occ_houses.insert(occ_houses.end(), ph.begin(), ph.end());
    for (const auto& ph : g.pp_houses) occ_houses.insert(occ_houses.end(), ph.begin(), ph.end());
    for (int h : occ_houses) {
      int clause_edges = 0;
      for (int e : g.instance.house_edges(h)) {
        const std::string& name = g.instance.agent_name(g.instance.edge(e).agent);
        if (name[0] == 'c') ++clause_edges;
      }
      CHECK(clause_edges <= 1);
    }
  }
  SUBCASE("agent capacities: variable agents 3, clause agents 2") {
    CnfFormula f = parse_dimacs_text("p cnf 1 1\n1 1 1 0\n");
    SatGadget g = build_3sat_gadget(f);
    for (int a : g.var_agents[0]) CHECK(g.instance.agent_capacity(a) == 3);
    for (int a : g.clause_agents[0]) CHECK(g.instance.agent_capacity(a) == 2);
  }
}

TEST_CASE("assignment_to_matching") {
  SUBCASE("a satisfying assignment yields a certifier-approved matching") {
    CnfFormula f = parse_dimacs_text("p cnf 1 1\n1 1 1 0\n");
    SatGadget g = build_3sat_gadget(f);
    BMatching m = assignment_to_matching(g, {true});
    CHECK(verify(g.instance, m, VerifyMode::WEAK).holds);
    // definitional oracle spot check
    CHECK(brute_check(g.instance, m, OracleMode::WEAK).holds);
  }
  SUBCASE("the chosen parity takes all three of its edges") {
    CnfFormula f = parse_dimacs_text("p cnf 1 1\n1 1 1 0\n");
    SatGadget g = build_3sat_gadget(f);
    BMatching m = assignment_to_matching(g, {true});
    for (size_t jj = 1; jj < g.var_agents[0].size(); jj += 2) {  // even positions j=2,4,...
      int matched = 0;
      for (int e : g.instance.agent_edges(g.var_agents[0][jj]))
        if (m.contains(e)) ++matched;
      CHECK(matched == 3);
    }
  }
  SUBCASE("a falsifying assignment is rejected") {
    CnfFormula f = parse_dimacs_text("p cnf 1 1\n1 1 1 0\n");
    SatGadget g = build_3sat_gadget(f);
    CHECK_THROWS_AS(assignment_to_matching(g, {false}), Error);
  }
}

TEST_CASE("matching_to_assignment") {
  SUBCASE("round trip over single-clause formulas") {
    for (const char* text : {"p cnf 1 1\n1 1 1 0\n", "p cnf 2 1\n1 -2 -2 0\n",
                             "p cnf 3 1\n-1 2 -3 0\n"}) {
      CnfFormula f = parse_dimacs_text(text);
      SatGadget g = build_3sat_gadget(f);
      auto assignment = solve_3sat(f);
      REQUIRE(assignment.has_value());
      BMatching m = assignment_to_matching(g, *assignment);
      std::vector<bool> back = matching_to_assignment(g, m);
      CHECK(formula_satisfied(f, back));
    }
  }
  SUBCASE("trivial positive formula forces true") {
    CnfFormula f = parse_dimacs_text("p cnf 1 1\n1 1 1 0\n");
    SatGadget g = build_3sat_gadget(f);
    BMatching m = assignment_to_matching(g, {true});
    CHECK(matching_to_assignment(g, m) == std::vector<bool>{true});
  }
}

TEST_CASE("sidecar maps name every construction piece") {
  X3CGadget g = build_x3c_gadget(x3c(kThreeTwo));
  std::ostringstream out;
  write_x3c_sidecar(g, out);
  std::string text = out.str();
  CHECK(text.find("# map: element 1 -> house v_1") != std::string::npos);
  CHECK(text.find("# map: set T1 -> agents") != std::string::npos);
  CHECK(text.find("# map: spare 1 -> house g_1") != std::string::npos);

  CnfFormula f = parse_dimacs_text("p cnf 1 1\n1 1 1 0\n");
  SatGadget sg = build_3sat_gadget(f);
  std::ostringstream sout;
  write_sat_sidecar(sg, sout);
  CHECK(sout.str().find("# map: var 1 pos 1 -> house p_1_1") != std::string::npos);
  CHECK(sout.str().find("# map: clause 1 -> house h_1") != std::string::npos);
}
