#include "popbm/solvers.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>

namespace popbm {

RankSplit split_ranks(const Instance& inst) {
  std::vector<int> e1, e2;
  for (int e = 0; e < inst.edge_count(); ++e) {
    int r = inst.edge(e).rank;
    if (r == 1) {
      e1.push_back(e);
    } else if (r == 2) {
      e2.push_back(e);
    } else {
      fail(Errc::precondition, "rank " + std::to_string(r) + " present; split needs ranks 1 and 2");
    }
  }
  std::vector<int> deg_e1(inst.house_count(), 0);
  for (int e : e1) ++deg_e1[inst.edge(e).house];
  std::vector<int> a1(inst.agent_count(), 1), a2(inst.agent_count(), 1);
  std::vector<int> h1(inst.house_count()), h2(inst.house_count());
  for (int h = 0; h < inst.house_count(); ++h) {
    h1[h] = inst.house_capacity(h);
    h2[h] = std::max(0, inst.house_capacity(h) - deg_e1[h]);
  }
  RankSplit split;
  split.g1 = CapGraph::of_edges(inst, std::move(e1), std::move(a1), std::move(h1));
  split.g2 = CapGraph::of_edges(inst, std::move(e2), std::move(a2), std::move(h2));
  return split;
}

namespace {

void require_two_rank_caps(const Instance& inst, bool allow_rank2_ties) {
  for (int a = 0; a < inst.agent_count(); ++a) {
    if (inst.agent_capacity(a) != 2)
      fail(Errc::precondition,
           "agent '" + inst.agent_name(a) + "' must have capacity 2, has " +
               std::to_string(inst.agent_capacity(a)));
    int r1 = 0, r2 = 0;
    for (int e : inst.agent_edges(a)) (inst.edge(e).rank == 1 ? r1 : r2) += 1;
    if (r1 > 1)
      fail(Errc::precondition,
           "agent '" + inst.agent_name(a) + "' has " + std::to_string(r1) + " rank-1 edges");
    if (!allow_rank2_ties && r2 > 1)
      fail(Errc::precondition,
           "agent '" + inst.agent_name(a) + "' has " + std::to_string(r2) + " rank-2 edges");
  }
}

std::string count_trace(const RankSplit& split) {
  return "split: |E1|=" + std::to_string(split.g1.edge_ids.size()) +
         " |E2|=" + std::to_string(split.g2.edge_ids.size());
}

BMatching union_matchings(const Instance& inst, std::span<const int> a, std::span<const int> b) {
  std::vector<int> ids(a.begin(), a.end());
  ids.insert(ids.end(), b.begin(), b.end());
  try {
    return BMatching::from_edge_ids(inst, std::move(ids));
  } catch (const Error& e) {
    fail(Errc::discrepancy, std::string("assembled matching is infeasible: ") + e.what());
  }
}

// Post-assembly completion: add rank-1 edges between unsaturated endpoints,
// and rank-2 edges at unsaturated agents without any rank-1 edge. Neither
// kind of addition can open a downgrade junction (there is no lower-rank
// edge left to prefer at the touched agent), and filling the house removes
// its unsaturated exposure. Agents with one rank-1 edge keep their second
// capacity slot governed by the partition machinery.
BMatching complete_matching(const Instance& inst, const BMatching& m) {
  std::vector<int> adeg(inst.agent_count(), 0), hdeg(inst.house_count(), 0);
  for (int e : m.edge_ids()) {
    ++adeg[inst.edge(e).agent];
    ++hdeg[inst.edge(e).house];
  }
  std::vector<char> has_rank1(inst.agent_count(), 0);
  for (const Edge& e : inst.edges())
    if (e.rank == 1) has_rank1[e.agent] = 1;
  std::vector<int> ids = m.edge_ids();
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (m.contains(e)) continue;
    const Edge& ed = inst.edge(e);
    if (ed.rank != 1 && has_rank1[ed.agent]) continue;
    if (adeg[ed.agent] >= inst.agent_capacity(ed.agent)) continue;
    if (hdeg[ed.house] >= inst.house_capacity(ed.house)) continue;
    ids.push_back(e);
    ++adeg[ed.agent];
    ++hdeg[ed.house];
  }
  return BMatching::from_edge_ids(inst, std::move(ids));
}

void certify_weak_or_fail(const Instance& inst, const BMatching& m, SolverReport& report) {
  VerifyResult v = verify(inst, m, VerifyMode::WEAK);
  if (!v.holds)
    fail(Errc::discrepancy, "solver output rejected by the weak-popularity certifier (witness kind " +
                                std::to_string(static_cast<int>(v.witness->kind)) + ")");
  report.trace.push_back("certify: weakly popular");
}

}  // namespace

SolverReport algorithm_a(const Instance& inst) {
  require_two_rank_caps(inst, /*allow_rank2_ties=*/false);
  RankSplit split = split_ranks(inst);
  SolverReport report;
  report.trace.push_back(count_trace(split));

  std::vector<int> deg_e2(inst.house_count(), 0);
  for (int e : split.g2.edge_ids) ++deg_e2[inst.edge(e).house];
  std::vector<int> over;  // H' in declaration order
  for (int h = 0; h < inst.house_count(); ++h)
    if (deg_e2[h] > split.g2.house_cap[h]) over.push_back(h);

  if (over.empty()) {
    BMatching m1 = max_b_matching(split.g1);
    BMatching m2 = max_b_matching(split.g2);
    report.trace.push_back("g2 fits every house; direct union of the two maxima");
    report.trace.push_back("m1 size=" + std::to_string(m1.size()) +
                           " m2 size=" + std::to_string(m2.size()));
    BMatching m = complete_matching(inst, union_matchings(inst, m1.edge_ids(), m2.edge_ids()));
    certify_weak_or_fail(inst, m, report);
    report.result = m;
    return report;
  }

  PartitionSpec spec;
  std::vector<char> in_class(inst.agent_count(), 0);
  for (int h : over) {
    std::vector<int> members;
    for (int e : split.g2.house_adj[h]) {
      int a = inst.edge(e).agent;
      if (in_class[a])
        fail(Errc::discrepancy, "rank-2 neighborhoods are not disjoint at agent '" +
                                    inst.agent_name(a) + "'");
      in_class[a] = 1;
      members.push_back(a);
    }
    std::sort(members.begin(), members.end());
    spec.names.push_back(inst.house_name(h));
    spec.classes.push_back(std::move(members));
    spec.quotas.push_back(split.g2.house_cap[h]);
  }
  std::vector<int> rest;
  for (int a = 0; a < inst.agent_count(); ++a)
    if (!in_class[a]) rest.push_back(a);
  spec.names.push_back("rest");
  spec.classes.push_back(std::move(rest));
  spec.quotas.push_back(0);
  {
    std::ostringstream os;
    os << "over-demanded houses:";
    for (int h : over) os << ' ' << inst.house_name(h);
    report.trace.push_back(os.str());
  }

  auto m1 = partition_matching(split.g1, spec);
  if (!m1) {
    report.trace.push_back("partition matching: does not exist");
    return report;
  }
  report.trace.push_back("partition matching: size=" + std::to_string(m1->size()));

  std::vector<char> matched(inst.agent_count(), 0);
  for (int e : m1->edge_ids()) matched[inst.edge(e).agent] = 1;
  std::vector<int> m2_ids;
  for (size_t i = 0; i < over.size(); ++i) {
    int h = over[i];
    int want = spec.quotas[i];
    int got = 0;
    for (int a : spec.classes[i]) {
      if (got == want) break;
      if (!matched[a]) continue;
      int e = inst.find_edge(a, h);
      m2_ids.push_back(e);
      ++got;
    }
    if (got != want)
      fail(Errc::discrepancy, "partition matching saturated fewer than k agents in class " +
                                  spec.names[i]);
  }
  for (int a : spec.classes.back())
    for (int e : split.g2.agent_adj[a]) m2_ids.push_back(e);
  report.trace.push_back("assembly: " + std::to_string(m2_ids.size()) + " rank-2 edges");

  BMatching m = complete_matching(inst, union_matchings(inst, m1->edge_ids(), m2_ids));
  certify_weak_or_fail(inst, m, report);
  report.result = m;
  return report;
}

// ---------------------------------------------------------------------------
// Algorithm A': partition construction and pipeline

namespace {

// Houses reachable from `start` by an alternating path (either first-edge
// type, no repeated edges). Exhaustive DFS; desk scale.
std::vector<char> reachable_houses(const CapGraph& g, const BMatching& m, int start,
                                   long long* budget) {
  const Instance& inst = *g.inst;
  std::vector<char> result(inst.house_count(), 0);
  std::vector<char> used(inst.edge_count(), 0);
  // need: 0 = next edge non-matching, 1 = matching, 2 = either
  auto tick = [&] {
    if (--*budget < 0) fail(Errc::budget_exceeded, "reachability search budget exceeded");
  };
  std::function<void(int, int)> from_agent, from_house;
  from_agent = [&](int x, int need) {
    tick();
    for (int e : g.agent_adj[x]) {
      if (used[e]) continue;
      bool is_m = m.contains(e);
      if (need != 2 && is_m != (need == 1)) continue;
      used[e] = 1;
      int h = inst.edge(e).house;
      result[h] = 1;
      from_house(h, is_m ? 0 : 1);
      used[e] = 0;
    }
  };
  from_house = [&](int h, int need) {
    tick();
    for (int e : g.house_adj[h]) {
      if (used[e]) continue;
      bool is_m = m.contains(e);
      if (is_m != (need == 1)) continue;
      used[e] = 1;
      from_agent(inst.edge(e).agent, is_m ? 0 : 1);
      used[e] = 0;
    }
  };
  from_agent(start, 2);
  return result;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int x, int y) { parent[find(x)] = find(y); }
};

}  // namespace

APrimePartition build_aprime_partition(const Instance& inst) {
  require_two_rank_caps(inst, /*allow_rank2_ties=*/true);
  RankSplit split = split_ranks(inst);
  BMatching m2 = max_b_matching(split.g2);
  EouLabeling labels = eou_labels(split.g2, m2);

  // The grouped agents are the interchangeable ones: those some maximum
  // g2-matching leaves unmatched, i.e. the E side of the labeling. They are
  // exactly the matched agents that even alternating paths from unmatched
  // agents can reach (plus the unmatched agents themselves), which is what
  // makes them need a rank-1 fallback. Agents without rank-2 edges carry no
  // g2 constraint and stay in the remainder class.
  std::vector<int> grouped;
  for (int a = 0; a < inst.agent_count(); ++a)
    if (labels.agent[a] == EouLabel::E && !split.g2.agent_adj[a].empty()) grouped.push_back(a);

  long long budget = 200'000'000;
  std::vector<std::vector<char>> reach(inst.agent_count());
  for (int a : grouped) reach[a] = reachable_houses(split.g2, m2, a, &budget);

  UnionFind uf(inst.agent_count());
  for (int h = 0; h < inst.house_count(); ++h) {
    int first = -1;
    for (int a : grouped) {
      if (!reach[a][h]) continue;
      if (first < 0)
        first = a;
      else
        uf.unite(first, a);
    }
  }

  std::vector<int> roots;
  std::vector<std::vector<int>> members(inst.agent_count());
  for (int a : grouped) {
    int r = uf.find(a);
    if (members[r].empty()) roots.push_back(r);
    members[r].push_back(a);
  }
  std::sort(roots.begin(), roots.end(),
            [&](int x, int y) { return members[x].front() < members[y].front(); });

  std::vector<char> matched2(inst.agent_count(), 0);
  for (int e : m2.edge_ids()) matched2[inst.edge(e).agent] = 1;

  APrimePartition part;
  part.m2 = m2;
  ZSpec& z = part.zspec;
  int idx = 0;
  for (int r : roots) {
    ++idx;
    std::vector<int> cls = members[r];
    std::sort(cls.begin(), cls.end());
    int k = 0;
    for (int a : cls) k += matched2[a];
    z.base.names.push_back("C" + std::to_string(idx));
    z.base.quotas.push_back(k);
    z.components.push_back(split.g2.restrict_agents(cls));
    z.base.classes.push_back(std::move(cls));
  }
  part.grouped_classes = idx;
  std::vector<int> rest;
  std::vector<char> in_grouped(inst.agent_count(), 0);
  for (int a : grouped) in_grouped[a] = 1;
  for (int a = 0; a < inst.agent_count(); ++a)
    if (!in_grouped[a]) rest.push_back(a);
  z.base.names.push_back("rest");
  z.base.quotas.push_back(0);
  z.base.classes.push_back(std::move(rest));
  z.components.push_back(CapGraph::of_edges(inst, {}, std::vector<int>(inst.agent_count(), 1),
                                            std::vector<int>(inst.house_count(), 1)));
  z.validate(inst);
  return part;
}

SolverReport algorithm_a_prime(const Instance& inst) {
  APrimePartition part = build_aprime_partition(inst);
  RankSplit split = split_ranks(inst);
  SolverReport report;
  report.trace.push_back(count_trace(split));
  report.trace.push_back("g2 maximum matching: size=" + std::to_string(part.m2.size()));
  report.trace.push_back("partition: " + std::to_string(part.grouped_classes) +
                         " grouped classes + remainder");

  auto m1 = z_partition_matching(split.g1, part.zspec);
  if (!m1) {
    report.trace.push_back("z-partition matching: does not exist");
    return report;
  }
  report.trace.push_back("z-partition matching: size=" + std::to_string(m1->size()));

  std::vector<char> matched1(inst.agent_count(), 0);
  for (int e : m1->edge_ids()) matched1[inst.edge(e).agent] = 1;

  std::vector<int> m2_ids;
  for (int i = 0; i < part.grouped_classes; ++i) {
    std::vector<int> sat;
    for (int a : part.zspec.base.classes[i])
      if (matched1[a]) sat.push_back(a);
    CapGraph restricted = part.zspec.components[i].restrict_agents(sat);
    BMatching mi = max_b_matching(restricted);
    if (mi.size() != part.zspec.base.quotas[i])
      fail(Errc::discrepancy, "class " + part.zspec.base.names[i] +
                                  " cannot reassemble a maximum component matching from the "
                                  "agents the z-partition matching saturated");
    for (int e : mi.edge_ids()) m2_ids.push_back(e);
  }
  // agents outside the grouped classes keep their maximum-matching edges
  for (int e : part.m2.edge_ids()) {
    int a = inst.edge(e).agent;
    int cls = part.zspec.base.class_of(a);
    if (cls == part.grouped_classes) m2_ids.push_back(e);
  }
  report.trace.push_back("assembly: " + std::to_string(m2_ids.size()) + " rank-2 edges");

  BMatching m = complete_matching(inst, union_matchings(inst, m1->edge_ids(), m2_ids));
  certify_weak_or_fail(inst, m, report);
  report.result = m;
  return report;
}

void serialize_report(const Instance& inst, const SolverReport& report, std::ostream& out) {
  out << "# trace:\n";
  for (const std::string& line : report.trace) out << "# trace: " << line << '\n';
  if (report.result) serialize_matching(inst, *report.result, out);
}

std::string report_to_text(const Instance& inst, const SolverReport& report) {
  std::ostringstream out;
  serialize_report(inst, report, out);
  return out.str();
}

}  // namespace popbm
