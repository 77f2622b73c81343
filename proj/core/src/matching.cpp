#include "popbm/matching.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace popbm {

CapGraph CapGraph::whole(const Instance& inst) {
  std::vector<int> ids(inst.edge_count());
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<int> ac(inst.agent_count()), hc(inst.house_count());
  for (int a = 0; a < inst.agent_count(); ++a) ac[a] = inst.agent_capacity(a);
  for (int h = 0; h < inst.house_count(); ++h) hc[h] = inst.house_capacity(h);
  return of_edges(inst, std::move(ids), std::move(ac), std::move(hc));
}

CapGraph CapGraph::of_edges(const Instance& inst, std::vector<int> edge_ids,
                            std::vector<int> agent_cap, std::vector<int> house_cap) {
  CapGraph g;
  g.inst = &inst;
  std::sort(edge_ids.begin(), edge_ids.end());
  g.edge_ids = std::move(edge_ids);
  if (static_cast<int>(agent_cap.size()) != inst.agent_count() ||
      static_cast<int>(house_cap.size()) != inst.house_count())
    fail(Errc::precondition, "capacity vectors must cover every vertex");
  g.agent_cap = std::move(agent_cap);
  g.house_cap = std::move(house_cap);
  g.agent_adj.assign(inst.agent_count(), {});
  g.house_adj.assign(inst.house_count(), {});
  for (int e : g.edge_ids) {
    if (e < 0 || e >= inst.edge_count()) fail(Errc::non_edge, "edge id out of range");
    g.agent_adj[inst.edge(e).agent].push_back(e);
    g.house_adj[inst.edge(e).house].push_back(e);
  }
  return g;
}

CapGraph CapGraph::restrict_agents(std::span<const int> agents) const {
  std::vector<char> keep(inst->agent_count(), 0);
  for (int a : agents) keep[a] = 1;
  std::vector<int> ids;
  for (int e : edge_ids)
    if (keep[inst->edge(e).agent]) ids.push_back(e);
  return of_edges(*inst, std::move(ids), agent_cap, house_cap);
}

bool CapGraph::unit_agent_caps() const {
  // only agents that actually carry subgraph edges matter
  for (int a = 0; a < inst->agent_count(); ++a)
    if (!agent_adj[a].empty() && agent_cap[a] != 1) return false;
  return true;
}

bool CapGraph::contains_edge(int e) const {
  return std::binary_search(edge_ids.begin(), edge_ids.end(), e);
}

void require_feasible(const CapGraph& g, const BMatching& m) {
  std::vector<int> adeg(g.inst->agent_count(), 0), hdeg(g.inst->house_count(), 0);
  for (int e : m.edge_ids()) {
    if (!g.contains_edge(e)) fail(Errc::non_edge, "matching edge outside the subgraph");
    const Edge& ed = g.inst->edge(e);
    if (++adeg[ed.agent] > g.agent_cap[ed.agent])
      fail(Errc::capacity_exceeded, "agent capacity exceeded in subgraph");
    if (++hdeg[ed.house] > g.house_cap[ed.house])
      fail(Errc::capacity_exceeded, "house capacity exceeded in subgraph");
  }
}

namespace {

struct Augmenter {
  const CapGraph& g;
  std::vector<char> in_m;
  std::vector<int> adeg, hdeg;
  std::vector<int> agent_token, house_token;
  int token = 0;
  // iteration orders; defaults are declaration/id order
  std::vector<int> agent_order;
  const std::vector<std::vector<int>>* aadj;
  const std::vector<std::vector<int>>* hadj;

  explicit Augmenter(const CapGraph& g_) : g(g_) {
    in_m.assign(g.inst->edge_count(), 0);
    adeg.assign(g.inst->agent_count(), 0);
    hdeg.assign(g.inst->house_count(), 0);
    agent_token.assign(g.inst->agent_count(), 0);
    house_token.assign(g.inst->house_count(), 0);
    agent_order.resize(g.inst->agent_count());
    std::iota(agent_order.begin(), agent_order.end(), 0);
    aadj = &g.agent_adj;
    hadj = &g.house_adj;
  }

  bool dfs(int a) {
    for (int e : (*aadj)[a]) {
      if (in_m[e]) continue;
      int h = g.inst->edge(e).house;
      if (house_token[h] == token) continue;
      house_token[h] = token;
      if (hdeg[h] < g.house_cap[h]) {
        in_m[e] = 1;
        ++adeg[a];
        ++hdeg[h];
        return true;
      }
      for (int e2 : (*hadj)[h]) {
        if (!in_m[e2]) continue;
        int a2 = g.inst->edge(e2).agent;
        if (agent_token[a2] == token) continue;
        agent_token[a2] = token;
        if (dfs(a2)) {
          in_m[e2] = 0;
          --adeg[a2];
          in_m[e] = 1;
          ++adeg[a];
          return true;
        }
      }
    }
    return false;
  }

  BMatching run() {
    bool progress = true;
    while (progress) {
      progress = false;
      for (int a : agent_order) {
        while (adeg[a] < g.agent_cap[a]) {
          ++token;
          if (!dfs(a)) break;
          progress = true;
        }
      }
    }
    std::vector<int> ids;
    for (int e : g.edge_ids)
      if (in_m[e]) ids.push_back(e);
    return BMatching::unchecked(*g.inst, ids);
  }
};

}  // namespace

BMatching max_b_matching(const CapGraph& g) {
  Augmenter aug(g);
  return aug.run();
}

BMatching max_b_matching_randomized(const CapGraph& g, std::mt19937& rng) {
  Augmenter aug(g);
  std::shuffle(aug.agent_order.begin(), aug.agent_order.end(), rng);
  std::vector<std::vector<int>> aadj = g.agent_adj, hadj = g.house_adj;
  for (auto& v : aadj) std::shuffle(v.begin(), v.end(), rng);
  for (auto& v : hadj) std::shuffle(v.begin(), v.end(), rng);
  aug.aadj = &aadj;
  aug.hadj = &hadj;
  return aug.run();
}

// ---------------------------------------------------------------------------
// PartitionSpec

void PartitionSpec::validate(const Instance& inst) const {
  if (classes.size() != quotas.size() || classes.size() != names.size())
    fail(Errc::precondition, "partition spec arity mismatch");
  std::vector<int> owner(inst.agent_count(), -1);
  for (size_t i = 0; i < classes.size(); ++i) {
    if (quotas[i] < 0) fail(Errc::bad_value, "quota must be nonnegative");
    if (quotas[i] > static_cast<int>(classes[i].size()))
      fail(Errc::bad_value, "quota exceeds class size for class " + names[i]);
    for (int a : classes[i]) {
      if (a < 0 || a >= inst.agent_count()) fail(Errc::unknown_agent, "agent index out of range");
      if (owner[a] != -1) fail(Errc::precondition, "classes are not disjoint");
      owner[a] = static_cast<int>(i);
    }
  }
  for (int a = 0; a < inst.agent_count(); ++a)
    if (owner[a] == -1)
      fail(Errc::precondition, "agent '" + inst.agent_name(a) + "' not covered by the partition");
}

int PartitionSpec::class_of(int agent) const {
  for (size_t i = 0; i < classes.size(); ++i)
    for (int a : classes[i])
      if (a == agent) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

PartitionSpec parse_partition_spec(const Instance& inst, std::istream& in) {
  PartitionSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] != "class" || tok.size() < 3)
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 'class <name> <k> <agent...>'");
    spec.names.push_back(tok[1]);
    int k = 0;
    try {
      k = std::stoi(tok[2]);
    } catch (const std::exception&) {
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad quota");
    }
    spec.quotas.push_back(k);
    std::vector<int> members;
    for (size_t i = 3; i < tok.size(); ++i) members.push_back(inst.agent_index(tok[i]));
    std::sort(members.begin(), members.end());
    spec.classes.push_back(std::move(members));
  }
  spec.validate(inst);
  return spec;
}

PartitionSpec parse_partition_spec_text(const Instance& inst, const std::string& text) {
  std::istringstream in(text);
  return parse_partition_spec(inst, in);
}

void serialize_partition_spec(const Instance& inst, const PartitionSpec& spec, std::ostream& out) {
  for (size_t i = 0; i < spec.classes.size(); ++i) {
    out << "class " << spec.names[i] << ' ' << spec.quotas[i];
    for (int a : spec.classes[i]) out << ' ' << inst.agent_name(a);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Improving sequences (plain and z)

namespace {

constexpr long long kSequenceBudget = 50'000'000;

// Class bookkeeping shared by the plain and z searches.
struct ClassState {
  std::vector<int> class_of;       // per agent
  std::vector<int> matched_count;  // per class
  std::vector<std::vector<int>> matched_agents;
  std::vector<char> deficient, excessive, equal_cls;
};

struct SeqSearch {
  const CapGraph& g;
  const BMatching& m;
  const PartitionSpec& spec;
  const ZSpec* zspec;  // null for the plain variant
  ClassState cls;
  std::vector<char> used;
  std::vector<char> agent_matched;
  std::vector<char> start_used;  // an agent may begin at most one path
  std::vector<SequencePath> seq;
  std::vector<int> cur;  // edge ids of the path under construction
  int cur_start = -1;
  long long ticks = 0;
  std::optional<ImprovingSequence> result;

  SeqSearch(const CapGraph& g_, const BMatching& m_, const PartitionSpec& spec_,
            const ZSpec* zspec_)
      : g(g_), m(m_), spec(spec_), zspec(zspec_) {
    used.assign(g.inst->edge_count(), 0);
    agent_matched.assign(g.inst->agent_count(), 0);
    start_used.assign(g.inst->agent_count(), 0);
    for (int e : m.edge_ids()) agent_matched[g.inst->edge(e).agent] = 1;
  }

  void tick() {
    if (++ticks > kSequenceBudget)
      fail(Errc::budget_exceeded, "improving sequence search budget exceeded");
  }

  // New matched set of class t when end_agent hands its slot to next_agent.
  bool z_link_ok(int t, int end_agent, int next_agent) {
    std::vector<int> z;
    for (int a : cls.matched_agents[t])
      if (a != end_agent) z.push_back(a);
    if (next_agent != end_agent) z.push_back(next_agent);
    std::sort(z.begin(), z.end());
    return z_membership(zspec->components[t], z);
  }

  bool accept_class(int t) const {
    if (zspec) return cls.excessive[t];
    return cls.matched_count[t] > spec.quotas[t];
  }

  bool link_class_ok(int t) const {
    if (zspec) return cls.equal_cls[t];
    return true;
  }

  // Current path ends at `end_agent` (arrived by a matching edge). Either the
  // sequence is complete or the next path starts in the same class.
  bool arrived(int end_agent) {
    tick();
    int t = cls.class_of[end_agent];
    if (accept_class(t)) {
      SequencePath p;
      p.edges = cur;
      p.start_agent = cur_start;
      p.end_agent = end_agent;
      p.start_class = cls.class_of[cur_start];
      p.end_class = t;
      std::vector<SequencePath> done = seq;
      done.push_back(std::move(p));
      result = ImprovingSequence{std::move(done)};
      return false;
    }
    if (!link_class_ok(t)) return true;
    // chain to the next path: either the same vertex or an unmatched agent
    // of the same class
    SequencePath p;
    p.edges = cur;
    p.start_agent = cur_start;
    p.end_agent = end_agent;
    p.start_class = cls.class_of[cur_start];
    p.end_class = t;
    seq.push_back(p);
    std::vector<int> saved_cur;
    saved_cur.swap(cur);
    int saved_start = cur_start;
    bool cont = true;
    for (int next : spec.classes[t]) {
      if (next != end_agent && agent_matched[next]) continue;
      if (start_used[next]) continue;
      if (zspec && !z_link_ok(t, end_agent, next)) continue;
      cur_start = next;
      start_used[next] = 1;
      bool keep = extend_from_agent(next);
      start_used[next] = 0;
      if (!keep) {
        cont = false;
        break;
      }
    }
    cur.swap(saved_cur);
    cur_start = saved_start;
    seq.pop_back();
    return cont;
  }

  // Grow the current path from an agent: pick an unused non-matching edge,
  // then an unused matching edge at its house.
  bool extend_from_agent(int a) {
    tick();
    for (int e : g.agent_adj[a]) {
      if (m.contains(e) || used[e]) continue;
      used[e] = 1;
      cur.push_back(e);
      int h = g.inst->edge(e).house;
      for (int e2 : g.house_adj[h]) {
        if (!m.contains(e2) || used[e2]) continue;
        used[e2] = 1;
        cur.push_back(e2);
        int a2 = g.inst->edge(e2).agent;
        bool cont = arrived(a2) && extend_from_agent(a2);
        cur.pop_back();
        used[e2] = 0;
        if (!cont) {
          cur.pop_back();
          used[e] = 0;
          return false;
        }
      }
      cur.pop_back();
      used[e] = 0;
    }
    return true;
  }

  std::optional<ImprovingSequence> run() {
    for (size_t t = 0; t < spec.classes.size(); ++t) {
      bool deficient = zspec ? static_cast<bool>(cls.deficient[t])
                             : cls.matched_count[t] < spec.quotas[t];
      if (!deficient) continue;
      for (int a : spec.classes[t]) {
        if (agent_matched[a]) continue;
        cur_start = a;
        start_used[a] = 1;
        bool keep = extend_from_agent(a);
        start_used[a] = 0;
        if (!keep) return result;
      }
    }
    return std::nullopt;
  }
};

ClassState class_state(const CapGraph& g, const BMatching& m, const PartitionSpec& spec,
                       const ZSpec* zspec) {
  ClassState cs;
  cs.class_of.assign(g.inst->agent_count(), -1);
  for (size_t i = 0; i < spec.classes.size(); ++i)
    for (int a : spec.classes[i]) cs.class_of[a] = static_cast<int>(i);
  cs.matched_count.assign(spec.classes.size(), 0);
  cs.matched_agents.assign(spec.classes.size(), {});
  std::vector<char> matched(g.inst->agent_count(), 0);
  for (int e : m.edge_ids()) matched[g.inst->edge(e).agent] = 1;
  for (size_t i = 0; i < spec.classes.size(); ++i)
    for (int a : spec.classes[i])
      if (matched[a]) {
        ++cs.matched_count[i];
        cs.matched_agents[i].push_back(a);
      }
  cs.deficient.assign(spec.classes.size(), 0);
  cs.excessive.assign(spec.classes.size(), 0);
  cs.equal_cls.assign(spec.classes.size(), 0);
  if (zspec) {
    for (size_t i = 0; i < spec.classes.size(); ++i) {
      int d = compute_d(zspec->components[i], cs.matched_agents[i]);
      int s = cs.matched_count[i] - d;
      cs.deficient[i] = d < spec.quotas[i];
      cs.excessive[i] = s > 0;
      cs.equal_cls[i] = !cs.deficient[i] && !cs.excessive[i];
    }
  }
  return cs;
}

void require_maximum(const CapGraph& g, const BMatching& m) {
  require_feasible(g, m);
  if (m.size() != max_b_matching(g).size())
    fail(Errc::not_maximum, "matching is not of maximum cardinality");
}

std::optional<ImprovingSequence> find_sequence(const CapGraph& g, const BMatching& m,
                                               const PartitionSpec& spec, const ZSpec* zspec) {
  if (!g.unit_agent_caps()) fail(Errc::precondition, "unit agent capacities required");
  spec.validate(*g.inst);
  require_maximum(g, m);
  SeqSearch search(g, m, spec, zspec);
  search.cls = class_state(g, m, spec, zspec);
  bool any_deficient = false;
  for (size_t t = 0; t < spec.classes.size(); ++t) {
    bool d = zspec ? static_cast<bool>(search.cls.deficient[t])
                   : search.cls.matched_count[t] < spec.quotas[t];
    any_deficient |= d;
  }
  if (!any_deficient) fail(Errc::precondition, "no class is deficient");
  return search.run();
}

}  // namespace

std::optional<ImprovingSequence> find_improving_sequence(const CapGraph& g, const BMatching& m,
                                                         const PartitionSpec& spec) {
  return find_sequence(g, m, spec, nullptr);
}

BMatching apply_sequence(const CapGraph& g, const BMatching& m, const ImprovingSequence& seq) {
  std::vector<char> toggle(g.inst->edge_count(), 0);
  for (const SequencePath& p : seq.paths)
    for (int e : p.edges) {
      if (toggle[e]) fail(Errc::precondition, "sequence paths are not edge-disjoint");
      toggle[e] = 1;
    }
  std::vector<int> ids;
  for (int e = 0; e < g.inst->edge_count(); ++e) {
    bool in = m.contains(e);
    if (toggle[e]) in = !in;
    if (in) ids.push_back(e);
  }
  BMatching result = BMatching::from_edge_ids(*g.inst, std::move(ids));
  require_feasible(g, result);
  if (result.size() != m.size())
    fail(Errc::discrepancy, "applying an improving sequence changed the cardinality");
  return result;
}

std::optional<BMatching> partition_matching(const CapGraph& g, const PartitionSpec& spec) {
  if (!g.unit_agent_caps()) fail(Errc::precondition, "unit agent capacities required");
  spec.validate(*g.inst);
  BMatching m = max_b_matching(g);
  auto deficit = [&](const BMatching& mm) {
    ClassState cs = class_state(g, mm, spec, nullptr);
    long long total = 0;
    for (size_t i = 0; i < spec.classes.size(); ++i)
      total += std::max(0, spec.quotas[i] - cs.matched_count[i]);
    return total;
  };
  long long before = deficit(m);
  while (before > 0) {
    auto seq = find_improving_sequence(g, m, spec);
    if (!seq) return std::nullopt;
    m = apply_sequence(g, m, *seq);
    long long after = deficit(m);
    if (after >= before)
      fail(Errc::discrepancy, "improving sequence did not reduce the quota deficit");
    before = after;
  }
  return m;
}

// ---------------------------------------------------------------------------
// E/O/U labels

EouLabeling eou_labels(const CapGraph& g, const BMatching& m) {
  if (!g.unit_agent_caps()) fail(Errc::precondition, "unit agent capacities required");
  require_maximum(g, m);
  const Instance& inst = *g.inst;
  std::vector<int> adeg(inst.agent_count(), 0), hdeg(inst.house_count(), 0);
  for (int e : m.edge_ids()) {
    ++adeg[inst.edge(e).agent];
    ++hdeg[inst.edge(e).house];
  }
  // reached[side][parity]
  std::vector<char> agent_seen[2] = {std::vector<char>(inst.agent_count(), 0),
                                     std::vector<char>(inst.agent_count(), 0)};
  std::vector<char> house_seen[2] = {std::vector<char>(inst.house_count(), 0),
                                     std::vector<char>(inst.house_count(), 0)};
  struct State {
    bool is_agent;
    int idx;
    int parity;
  };
  std::vector<State> queue;
  for (int a = 0; a < inst.agent_count(); ++a)
    if (adeg[a] < g.agent_cap[a]) {
      agent_seen[0][a] = 1;
      queue.push_back({true, a, 0});
    }
  for (int h = 0; h < inst.house_count(); ++h)
    if (hdeg[h] < g.house_cap[h]) {
      house_seen[0][h] = 1;
      queue.push_back({false, h, 0});
    }
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    State s = queue[qi];
    if (s.parity == 0) {
      // continue with a non-matching edge
      if (s.is_agent) {
        for (int e : g.agent_adj[s.idx]) {
          if (m.contains(e)) continue;
          int h = inst.edge(e).house;
          if (!house_seen[1][h]) {
            house_seen[1][h] = 1;
            queue.push_back({false, h, 1});
          }
        }
      } else {
        for (int e : g.house_adj[s.idx]) {
          if (m.contains(e)) continue;
          int a = inst.edge(e).agent;
          if (!agent_seen[1][a]) {
            agent_seen[1][a] = 1;
            queue.push_back({true, a, 1});
          }
        }
      }
    } else {
      // continue with a matching edge
      if (s.is_agent) {
        for (int e : g.agent_adj[s.idx]) {
          if (!m.contains(e)) continue;
          int h = inst.edge(e).house;
          if (!house_seen[0][h]) {
            house_seen[0][h] = 1;
            queue.push_back({false, h, 0});
          }
        }
      } else {
        for (int e : g.house_adj[s.idx]) {
          if (!m.contains(e)) continue;
          int a = inst.edge(e).agent;
          if (!agent_seen[0][a]) {
            agent_seen[0][a] = 1;
            queue.push_back({true, a, 0});
          }
        }
      }
    }
  }
  EouLabeling out;
  out.agent.resize(inst.agent_count());
  out.house.resize(inst.house_count());
  for (int a = 0; a < inst.agent_count(); ++a)
    out.agent[a] = agent_seen[0][a] ? EouLabel::E : agent_seen[1][a] ? EouLabel::O : EouLabel::U;
  for (int h = 0; h < inst.house_count(); ++h)
    out.house[h] = house_seen[0][h] ? EouLabel::E : house_seen[1][h] ? EouLabel::O : EouLabel::U;
  return out;
}

// ---------------------------------------------------------------------------
// d(A') and Z-membership

int compute_d(const CapGraph& component, std::span<const int> agent_subset) {
  if (!component.unit_agent_caps()) fail(Errc::precondition, "unit agent capacities required");
  const Instance& inst = *component.inst;
  std::vector<char> in_sub(inst.agent_count(), 0);
  for (int a : agent_subset) {
    if (a < 0 || a >= inst.agent_count()) fail(Errc::unknown_agent, "agent index out of range");
    in_sub[a] = 1;
  }
  BMatching m0 = max_b_matching(component);
  std::vector<char> in_m(inst.edge_count(), 0);
  std::vector<char> matched(inst.agent_count(), 0);
  for (int e : m0.edge_ids()) {
    in_m[e] = 1;
    matched[inst.edge(e).agent] = 1;
  }
  while (true) {
    // even alternating path from an unmatched subset agent to a matched
    // non-subset agent; BFS tree paths are vertex-distinct
    std::vector<int> agent_parent(inst.agent_count(), -2);  // parent edge, -2 unseen, -1 root
    std::vector<int> house_parent(inst.house_count(), -2);
    std::vector<int> frontier;
    for (int a = 0; a < inst.agent_count(); ++a)
      if (in_sub[a] && !matched[a]) {
        agent_parent[a] = -1;
        frontier.push_back(a);
      }
    int target = -1;
    while (!frontier.empty() && target < 0) {
      std::vector<int> next;
      for (int a : frontier) {
        for (int e : component.agent_adj[a]) {
          if (in_m[e]) continue;
          int h = inst.edge(e).house;
          if (house_parent[h] != -2) continue;
          house_parent[h] = e;
          for (int e2 : component.house_adj[h]) {
            if (!in_m[e2]) continue;
            int a2 = inst.edge(e2).agent;
            if (agent_parent[a2] != -2) continue;
            agent_parent[a2] = e2;
            if (!in_sub[a2]) {
              target = a2;
              break;
            }
            next.push_back(a2);
          }
          if (target >= 0) break;
        }
        if (target >= 0) break;
      }
      frontier = std::move(next);
    }
    if (target < 0) break;
    // flip the tree path; only the endpoints change matched status
    int a = target;
    while (agent_parent[a] != -1) {
      int e2 = agent_parent[a];  // matching edge into a
      int h = inst.edge(e2).house;
      int e = house_parent[h];  // non-matching edge into h
      in_m[e2] = 0;
      in_m[e] = 1;
      a = inst.edge(e).agent;
    }
    matched[target] = 0;
    matched[a] = 1;
  }
  int d = 0;
  for (int a = 0; a < inst.agent_count(); ++a)
    if (in_sub[a] && matched[a]) ++d;
  return d;
}

bool z_membership(const CapGraph& component, std::span<const int> z) {
  std::vector<int> zs(z.begin(), z.end());
  std::sort(zs.begin(), zs.end());
  if (std::adjacent_find(zs.begin(), zs.end()) != zs.end())
    fail(Errc::precondition, "z contains a duplicate agent");
  for (int a : zs)
    if (a < 0 || a >= component.inst->agent_count())
      fail(Errc::unknown_agent, "agent index out of range");
  int nu = max_b_matching(component).size();
  if (static_cast<int>(zs.size()) != nu) return false;
  CapGraph restricted = component.restrict_agents(zs);
  return max_b_matching(restricted).size() == static_cast<int>(zs.size());
}

// ---------------------------------------------------------------------------
// ZSpec

void ZSpec::validate(const Instance& inst) const {
  base.validate(inst);
  if (components.size() != base.classes.size())
    fail(Errc::precondition, "one component graph per class required");
  for (size_t i = 0; i < components.size(); ++i) {
    const CapGraph& c = components[i];
    if (c.inst != &inst) fail(Errc::precondition, "component graph built on a different instance");
    if (!c.unit_agent_caps()) fail(Errc::precondition, "component agent capacities must be 1");
    for (int e : c.edge_ids) {
      int a = inst.edge(e).agent;
      bool in_class = std::binary_search(base.classes[i].begin(), base.classes[i].end(), a);
      if (!in_class)
        fail(Errc::precondition, "component edge at an agent outside class " + base.names[i]);
    }
    int nu = max_b_matching(c).size();
    if (nu != base.quotas[i])
      fail(Errc::precondition, "class " + base.names[i] + " quota " +
                                   std::to_string(base.quotas[i]) +
                                   " differs from component maximum matching size " +
                                   std::to_string(nu));
  }
}

ZSpec parse_zspec(const Instance& inst, std::istream& in,
                  const std::function<Instance(const std::string&)>& load_instance) {
  ZSpec z;
  std::vector<std::string> component_files;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "class" && tok.size() >= 3) {
      z.base.names.push_back(tok[1]);
      z.base.quotas.push_back(std::stoi(tok[2]));
      std::vector<int> members;
      for (size_t i = 3; i < tok.size(); ++i) members.push_back(inst.agent_index(tok[i]));
      std::sort(members.begin(), members.end());
      z.base.classes.push_back(std::move(members));
      component_files.emplace_back();
    } else if (tok[0] == "component" && tok.size() == 3) {
      auto it = std::find(z.base.names.begin(), z.base.names.end(), tok[1]);
      if (it == z.base.names.end())
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": unknown class '" + tok[1] + "'");
      component_files[it - z.base.names.begin()] = tok[2];
    } else {
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 'class' or 'component'");
    }
  }
  for (size_t i = 0; i < z.base.classes.size(); ++i) {
    if (component_files[i].empty()) {
      // no component: the class carries the trivial family {∅}
      z.components.push_back(CapGraph::of_edges(inst, {}, std::vector<int>(inst.agent_count(), 1),
                                                std::vector<int>(inst.house_count(), 1)));
      continue;
    }
    Instance comp = load_instance(component_files[i]);
    std::vector<int> ids;
    std::vector<int> ac(inst.agent_count(), 1), hc(inst.house_count(), 1);
    for (const Edge& e : comp.edges()) {
      int a = inst.agent_index(comp.agent_name(e.agent));
      int h = inst.house_index(comp.house_name(e.house));
      int id = inst.find_edge(a, h);
      if (id < 0)
        fail(Errc::non_edge, "component edge (" + comp.agent_name(e.agent) + ", " +
                                 comp.house_name(e.house) + ") is not a main instance edge");
      ids.push_back(id);
    }
    for (int a = 0; a < comp.agent_count(); ++a)
      ac[inst.agent_index(comp.agent_name(a))] = comp.agent_capacity(a);
    for (int h = 0; h < comp.house_count(); ++h)
      hc[inst.house_index(comp.house_name(h))] = comp.house_capacity(h);
    z.components.push_back(CapGraph::of_edges(inst, std::move(ids), std::move(ac), std::move(hc)));
  }
  z.validate(inst);
  return z;
}

std::optional<ImprovingSequence> find_z_improving_sequence(const CapGraph& g, const BMatching& m,
                                                           const ZSpec& zspec) {
  zspec.validate(*g.inst);
  return find_sequence(g, m, zspec.base, &zspec);
}

std::optional<BMatching> z_partition_matching(const CapGraph& g, const ZSpec& zspec) {
  if (!g.unit_agent_caps()) fail(Errc::precondition, "unit agent capacities required");
  zspec.validate(*g.inst);
  BMatching m = max_b_matching(g);
  auto z_deficit = [&](const BMatching& mm) {
    ClassState cs = class_state(g, mm, zspec.base, &zspec);
    long long total = 0;
    for (size_t i = 0; i < zspec.base.classes.size(); ++i) {
      int d = compute_d(zspec.components[i], cs.matched_agents[i]);
      total += std::max(0, zspec.base.quotas[i] - d);
    }
    return total;
  };
  long long before = z_deficit(m);
  int guard = (g.inst->agent_count() + 2) * (g.inst->agent_count() + 2) + 16;
  while (before > 0) {
    if (--guard < 0) fail(Errc::discrepancy, "z-partition matching loop failed to converge");
    auto seq = find_z_improving_sequence(g, m, zspec);
    if (!seq) return std::nullopt;
    m = apply_sequence(g, m, *seq);
    long long after = z_deficit(m);
    if (after >= before)
      fail(Errc::discrepancy, "z-improving sequence did not reduce the requirement deficit");
    before = after;
  }
  return m;
}

}  // namespace popbm
