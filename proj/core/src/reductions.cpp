#include "popbm/reductions.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace popbm {

namespace {

int element_index(const X3CInstance& x, const std::string& e) {
  auto it = std::find(x.ground_set.begin(), x.ground_set.end(), e);
  if (it == x.ground_set.end()) fail(Errc::unknown_vertex, "unknown element '" + e + "'");
  return static_cast<int>(it - x.ground_set.begin());
}

}  // namespace

X3CGadget build_x3c_gadget(const X3CInstance& x) {
  const int n = static_cast<int>(x.ground_set.size());
  const int m = static_cast<int>(x.triples.size());
  if (n % 3 != 0) fail(Errc::precondition, "ground set size must be divisible by 3");
  if (m < n / 3) fail(Errc::precondition, "need at least |K|/3 triples");
  const int spare = m - n / 3;

  InstanceBuilder b;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= 5; ++j)
      b.add_agent("a_" + std::to_string(i) + "_" + std::to_string(j), j == 4 ? 2 : 1);
  for (const auto& e : x.ground_set) b.add_house("v_" + e, 1);
  for (int i = 1; i <= m; ++i) {
    b.add_house("h_" + std::to_string(i), 1);
    b.add_house("hp_" + std::to_string(i), 1);
  }
  for (int l = 1; l <= spare; ++l) b.add_house("g_" + std::to_string(l), 1);

  for (int i = 1; i <= m; ++i) {
    const X3CTriple& t = x.triples[i - 1];
    std::string hi = "h_" + std::to_string(i), hpi = "hp_" + std::to_string(i);
    for (int j = 1; j <= 3; ++j) {
      std::string aj = "a_" + std::to_string(i) + "_" + std::to_string(j);
      b.add_edge(aj, "v_" + t.elems[j - 1], 1);
      b.add_edge(aj, hi, 2);
    }
    std::string a4 = "a_" + std::to_string(i) + "_4";
    std::string a5 = "a_" + std::to_string(i) + "_5";
    b.add_edge(a4, hi, 1);
    b.add_edge(a4, hpi, 2);
    b.add_edge(a5, hpi, 2);
    for (int l = 1; l <= spare; ++l) b.add_edge(a5, "g_" + std::to_string(l), 1);
  }

  X3CGadget g;
  g.source = x;
  g.instance = b.build();
  const Instance& inst = g.instance;
  g.element_house.resize(n);
  for (int k = 0; k < n; ++k) g.element_house[k] = inst.house_index("v_" + x.ground_set[k]);
  for (int i = 1; i <= m; ++i) {
    std::array<int, 5> agents{};
    for (int j = 1; j <= 5; ++j)
      agents[j - 1] = inst.agent_index("a_" + std::to_string(i) + "_" + std::to_string(j));
    g.set_agents.push_back(agents);
    g.set_houses.push_back({inst.house_index("h_" + std::to_string(i)),
                            inst.house_index("hp_" + std::to_string(i))});
  }
  for (int l = 1; l <= spare; ++l) g.g_houses.push_back(inst.house_index("g_" + std::to_string(l)));

  if (inst.agent_count() != 5 * m || inst.house_count() != n + 2 * m + spare)
    fail(Errc::discrepancy, "gadget size formulas violated");
  if (m > 0 && inst.max_rank() != 2) fail(Errc::discrepancy, "gadget must use exactly two ranks");
  return g;
}

BMatching cover_to_matching(const X3CGadget& g, const std::vector<std::string>& cover) {
  const X3CInstance& x = g.source;
  const int n = static_cast<int>(x.ground_set.size());
  std::vector<char> in_cover(x.triples.size(), 0);
  std::vector<int> covered(n, 0);
  for (const auto& name : cover) {
    auto it = std::find_if(x.triples.begin(), x.triples.end(),
                           [&](const X3CTriple& t) { return t.name == name; });
    if (it == x.triples.end()) fail(Errc::precondition, "unknown triple '" + name + "'");
    size_t i = it - x.triples.begin();
    if (in_cover[i]) fail(Errc::precondition, "triple '" + name + "' listed twice");
    in_cover[i] = 1;
    for (const auto& e : it->elems) ++covered[element_index(x, e)];
  }
  for (int k = 0; k < n; ++k)
    if (covered[k] != 1)
      fail(Errc::precondition, "element '" + x.ground_set[k] + "' covered " +
                                   std::to_string(covered[k]) + " times; cover not exact");

  const Instance& inst = g.instance;
  std::vector<int> ids;
  int next_g = 0;
  for (size_t i = 0; i < x.triples.size(); ++i) {
    const auto& agents = g.set_agents[i];
    if (in_cover[i]) {
      for (int j = 0; j < 3; ++j) {
        int vk = g.element_house[element_index(x, x.triples[i].elems[j])];
        ids.push_back(inst.find_edge(agents[j], vk));
      }
    } else {
      if (next_g >= static_cast<int>(g.g_houses.size()))
        fail(Errc::discrepancy, "more non-cover triples than spare houses");
      ids.push_back(inst.find_edge(agents[4], g.g_houses[next_g++]));
    }
    ids.push_back(inst.find_edge(agents[3], g.set_houses[i][0]));
    ids.push_back(inst.find_edge(agents[3], g.set_houses[i][1]));
  }
  return BMatching::from_edge_ids(inst, std::move(ids));
}

std::vector<std::string> matching_to_cover(const X3CGadget& g, const BMatching& m) {
  const Instance& inst = g.instance;
  const X3CInstance& x = g.source;
  std::vector<std::string> cover;
  std::vector<int> covered(x.ground_set.size(), 0);
  for (size_t i = 0; i < x.triples.size(); ++i) {
    bool all_rank1 = true;
    for (int j = 0; j < 3 && all_rank1; ++j) {
      int vk = g.element_house[element_index(x, x.triples[i].elems[j])];
      int e = inst.find_edge(g.set_agents[i][j], vk);
      all_rank1 = e >= 0 && m.contains(e);
    }
    if (all_rank1) {
      cover.push_back(x.triples[i].name);
      for (const auto& el : x.triples[i].elems) ++covered[element_index(x, el)];
    }
  }
  for (size_t k = 0; k < covered.size(); ++k)
    if (covered[k] != 1)
      fail(Errc::discrepancy, "extracted family does not cover element '" + x.ground_set[k] +
                                  "' exactly once");
  return cover;
}

void write_x3c_sidecar(const X3CGadget& g, std::ostream& out) {
  const Instance& inst = g.instance;
  for (size_t k = 0; k < g.source.ground_set.size(); ++k)
    out << "# map: element " << g.source.ground_set[k] << " -> house "
        << inst.house_name(g.element_house[k]) << '\n';
  for (size_t i = 0; i < g.source.triples.size(); ++i) {
    out << "# map: set " << g.source.triples[i].name << " -> agents";
    for (int a : g.set_agents[i]) out << ' ' << inst.agent_name(a);
    out << '\n';
    out << "# map: set " << g.source.triples[i].name << " -> houses "
        << inst.house_name(g.set_houses[i][0]) << ' ' << inst.house_name(g.set_houses[i][1])
        << '\n';
  }
  for (size_t l = 0; l < g.g_houses.size(); ++l)
    out << "# map: spare " << (l + 1) << " -> house " << inst.house_name(g.g_houses[l]) << '\n';
}

// ---------------------------------------------------------------------------
// 3-SAT gadget

SatGadget build_3sat_gadget(const CnfFormula& f) {
  const int k = f.variable_count;
  const int n = static_cast<int>(f.clauses.size());
  if (n == 0) fail(Errc::precondition, "formula has no clauses");
  std::vector<int> pos(k, 0), neg(k, 0);
  for (const auto& c : f.clauses)
    for (int lit : c) {
      if (lit == 0 || std::abs(lit) > k) fail(Errc::bad_value, "literal out of range");
      (lit > 0 ? pos : neg)[std::abs(lit) - 1] += 1;
    }
  SatGadget g;
  g.source = f;
  g.r.resize(k);
  for (int i = 0; i < k; ++i) {
    g.r[i] = std::max(pos[i], neg[i]);
    if (g.r[i] == 0)
      fail(Errc::precondition, "variable " + std::to_string(i + 1) + " never occurs");
  }

  InstanceBuilder b;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= 2 * g.r[i - 1]; ++j)
      b.add_agent("a_" + std::to_string(i) + "_" + std::to_string(j), 3);
  for (int c = 1; c <= n; ++c)
    for (int l = 1; l <= 3; ++l)
      b.add_agent("c_" + std::to_string(c) + "_" + std::to_string(l), 2);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= g.r[i - 1]; ++j) {
      b.add_house("p_" + std::to_string(i) + "_" + std::to_string(j), 1);
      b.add_house("pp_" + std::to_string(i) + "_" + std::to_string(j), 1);
      b.add_house("b_" + std::to_string(i) + "_" + std::to_string(j), 1);
      b.add_house("g_" + std::to_string(i) + "_" + std::to_string(j), 1);
    }
  for (int c = 1; c <= n; ++c) b.add_house("h_" + std::to_string(c), 1);

  for (int i = 1; i <= k; ++i) {
    const int ri = g.r[i - 1];
    auto agent = [&](int j) { return "a_" + std::to_string(i) + "_" + std::to_string(j); };
    for (int j = 1; j <= 2 * ri; ++j) {
      if (j % 2 == 1)
        b.add_edge(agent(j), "p_" + std::to_string(i) + "_" + std::to_string((j + 1) / 2), 1);
      else
        b.add_edge(agent(j), "pp_" + std::to_string(i) + "_" + std::to_string(j / 2), 1);
    }
    for (int j = 1; j <= 2 * ri; j += 2) {
      std::string bh = "b_" + std::to_string(i) + "_" + std::to_string((j + 1) / 2);
      b.add_edge(agent(j), bh, 2);
      b.add_edge(agent(j + 1), bh, 2);
    }
    for (int j = 2; j <= 2 * ri; j += 2) {
      std::string gh = "g_" + std::to_string(i) + "_" + std::to_string(j / 2);
      int next = j == 2 * ri ? 1 : j + 1;
      b.add_edge(agent(j), gh, 3);
      b.add_edge(agent(next), gh, 3);
    }
  }
  // occurrence wiring: slots assigned in increasing j per variable polarity,
  // clauses in order; no occurrence house serves two clause agents
  std::vector<int> next_pos(k, 1), next_neg(k, 1);
  std::vector<std::array<std::string, 3>> occ_names(n);
  for (int c = 1; c <= n; ++c)
    for (int l = 1; l <= 3; ++l) {
      int lit = f.clauses[c - 1][l - 1];
      int v = std::abs(lit);
      std::string house;
      if (lit > 0)
        house = "p_" + std::to_string(v) + "_" + std::to_string(next_pos[v - 1]++);
      else
        house = "pp_" + std::to_string(v) + "_" + std::to_string(next_neg[v - 1]++);
      occ_names[c - 1][l - 1] = house;
      std::string ca = "c_" + std::to_string(c) + "_" + std::to_string(l);
      b.add_edge(ca, house, 1);
      b.add_edge(ca, "h_" + std::to_string(c), 2);
    }

  g.instance = b.build();
  const Instance& inst = g.instance;
  g.var_agents.resize(k);
  g.p_houses.resize(k);
  g.pp_houses.resize(k);
  g.b_houses.resize(k);
  g.g_houses.resize(k);
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= 2 * g.r[i - 1]; ++j)
      g.var_agents[i - 1].push_back(
          inst.agent_index("a_" + std::to_string(i) + "_" + std::to_string(j)));
    for (int j = 1; j <= g.r[i - 1]; ++j) {
      g.p_houses[i - 1].push_back(
          inst.house_index("p_" + std::to_string(i) + "_" + std::to_string(j)));
      g.pp_houses[i - 1].push_back(
          inst.house_index("pp_" + std::to_string(i) + "_" + std::to_string(j)));
      g.b_houses[i - 1].push_back(
          inst.house_index("b_" + std::to_string(i) + "_" + std::to_string(j)));
      g.g_houses[i - 1].push_back(
          inst.house_index("g_" + std::to_string(i) + "_" + std::to_string(j)));
    }
  }
  for (int c = 1; c <= n; ++c) {
    std::array<int, 3> agents{};
    std::array<int, 3> occ{};
    for (int l = 1; l <= 3; ++l) {
      agents[l - 1] = inst.agent_index("c_" + std::to_string(c) + "_" + std::to_string(l));
      occ[l - 1] = inst.house_index(occ_names[c - 1][l - 1]);
    }
    g.clause_agents.push_back(agents);
    g.occ_house.push_back(occ);
    g.clause_house.push_back(inst.house_index("h_" + std::to_string(c)));
  }

  int sum2r = 0, sum4r = 0;
  for (int i = 0; i < k; ++i) {
    sum2r += 2 * g.r[i];
    sum4r += 4 * g.r[i];
  }
  if (inst.agent_count() != sum2r + 3 * n || inst.house_count() != sum4r + n)
    fail(Errc::discrepancy, "gadget size formulas violated");
  if (inst.has_ties()) fail(Errc::discrepancy, "gadget must not contain ties");
  if (inst.max_rank() != 3) fail(Errc::discrepancy, "gadget must use exactly three ranks");
  return g;
}

BMatching assignment_to_matching(const SatGadget& g, const std::vector<bool>& assignment) {
  const CnfFormula& f = g.source;
  const Instance& inst = g.instance;
  if (static_cast<int>(assignment.size()) != f.variable_count)
    fail(Errc::precondition, "assignment arity mismatch");
  if (!formula_satisfied(f, assignment))
    fail(Errc::precondition, "assignment does not satisfy the formula");

  std::vector<char> take(inst.edge_count(), 0);
  for (int i = 0; i < f.variable_count; ++i) {
    // true: even-index agents take everything; false: odd-index agents do
    for (size_t jj = 0; jj < g.var_agents[i].size(); ++jj) {
      int j = static_cast<int>(jj) + 1;
      if ((j % 2 == 0) != assignment[i]) continue;
      for (int e : inst.agent_edges(g.var_agents[i][jj])) take[e] = 1;
    }
  }
  for (size_t c = 0; c < f.clauses.size(); ++c) {
    for (int l = 0; l < 3; ++l) {
      int lit = f.clauses[c][l];
      bool v = assignment[std::abs(lit) - 1];
      if (!(lit > 0 ? v : !v)) continue;
      int ca = g.clause_agents[c][l];
      take[inst.find_edge(ca, g.occ_house[c][l])] = 1;
      take[inst.find_edge(ca, g.clause_house[c])] = 1;
      break;  // one chosen literal per clause
    }
  }
  std::vector<int> adeg(inst.agent_count(), 0), hdeg(inst.house_count(), 0);
  std::vector<int> ids;
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (!take[e]) continue;
    ids.push_back(e);
    ++adeg[inst.edge(e).agent];
    ++hdeg[inst.edge(e).house];
  }
  // final sweep: every rank-1 edge whose endpoints are both unsaturated
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (take[e] || inst.edge(e).rank != 1) continue;
    const Edge& ed = inst.edge(e);
    if (adeg[ed.agent] < inst.agent_capacity(ed.agent) &&
        hdeg[ed.house] < inst.house_capacity(ed.house)) {
      ids.push_back(e);
      ++adeg[ed.agent];
      ++hdeg[ed.house];
    }
  }
  return BMatching::from_edge_ids(inst, std::move(ids));
}

std::vector<bool> matching_to_assignment(const SatGadget& g, const BMatching& m) {
  const Instance& inst = g.instance;
  std::vector<bool> assignment(g.source.variable_count, false);
  for (int i = 0; i < g.source.variable_count; ++i) {
    bool all_pp_to_agents = true;
    for (int ph : g.pp_houses[i]) {
      bool matched_to_var_agent = false;
      for (int e : inst.house_edges(ph)) {
        if (!m.contains(e)) continue;
        int a = inst.edge(e).agent;
        if (std::find(g.var_agents[i].begin(), g.var_agents[i].end(), a) !=
            g.var_agents[i].end())
          matched_to_var_agent = true;
      }
      if (!matched_to_var_agent) {
        all_pp_to_agents = false;
        break;
      }
    }
    assignment[i] = all_pp_to_agents;
  }
  if (!formula_satisfied(g.source, assignment))
    fail(Errc::discrepancy, "extracted assignment does not satisfy the formula");
  return assignment;
}

void write_sat_sidecar(const SatGadget& g, std::ostream& out) {
  const Instance& inst = g.instance;
  for (int i = 0; i < g.source.variable_count; ++i) {
    out << "# map: var " << (i + 1) << " -> agents";
    for (int a : g.var_agents[i]) out << ' ' << inst.agent_name(a);
    out << '\n';
    for (size_t j = 0; j < g.p_houses[i].size(); ++j)
      out << "# map: var " << (i + 1) << " pos " << (j + 1) << " -> house "
          << inst.house_name(g.p_houses[i][j]) << '\n';
    for (size_t j = 0; j < g.pp_houses[i].size(); ++j)
      out << "# map: var " << (i + 1) << " neg " << (j + 1) << " -> house "
          << inst.house_name(g.pp_houses[i][j]) << '\n';
  }
  for (size_t c = 0; c < g.source.clauses.size(); ++c) {
    out << "# map: clause " << (c + 1) << " -> agents";
    for (int a : g.clause_agents[c]) out << ' ' << inst.agent_name(a);
    out << '\n';
    out << "# map: clause " << (c + 1) << " -> house " << inst.house_name(g.clause_house[c])
        << '\n';
    for (int l = 0; l < 3; ++l)
      out << "# map: clause " << (c + 1) << " lit " << (l + 1) << " -> house "
          << inst.house_name(g.occ_house[c][l]) << '\n';
  }
}

}  // namespace popbm
