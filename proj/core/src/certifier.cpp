#include "popbm/certifier.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace popbm {

namespace {

// Shared search state: the path under construction (edge ids, used flags and,
// when the instance is small enough, a bitmask for memoization) plus matching
// degrees and the step budget.
struct Ctx {
  const Instance& inst;
  const BMatching& m;
  std::vector<int> agent_deg, house_deg;
  std::vector<char> used;
  std::vector<int> path;
  uint64_t mask = 0;
  bool mask_ok = false;
  int state_bits = 0;
  std::unordered_set<uint64_t>* memo = nullptr;
  long long ticks = 0;
  long long budget = 0;

  Ctx(const Instance& inst_, const BMatching& m_, long long budget_)
      : inst(inst_), m(m_), budget(budget_) {
    agent_deg.assign(inst.agent_count(), 0);
    house_deg.assign(inst.house_count(), 0);
    for (int e : m.edge_ids()) {
      ++agent_deg[inst.edge(e).agent];
      ++house_deg[inst.edge(e).house];
    }
    used.assign(inst.edge_count(), 0);
    unsigned states = static_cast<unsigned>(inst.house_count() +
                                            inst.agent_count() * (inst.max_rank() + 2) + 1);
    state_bits = std::bit_width(states);
    mask_ok = inst.edge_count() + state_bits <= 63;
  }

  bool in_m(int e) const { return m.contains(e); }
  bool agent_saturated(int a) const { return agent_deg[a] >= inst.agent_capacity(a); }
  bool house_unsaturated(int h) const { return house_deg[h] < inst.house_capacity(h); }

  void push(int e) {
    used[e] = 1;
    if (mask_ok) mask |= uint64_t{1} << e;
    path.push_back(e);
  }
  void pop(int e) {
    used[e] = 0;
    if (mask_ok) mask &= ~(uint64_t{1} << e);
    path.pop_back();
  }
  void tick() {
    if (++ticks > budget) fail(Errc::budget_exceeded, "certifier search budget exceeded");
  }

  bool memo_skip(uint64_t state) {
    if (!memo || !mask_ok) return false;
    return !memo->insert((mask << state_bits) | state).second;
  }
  uint64_t house_state(int h) const { return static_cast<uint64_t>(h); }
  uint64_t agent_state(int a, int q) const {
    return static_cast<uint64_t>(inst.house_count() + a * (inst.max_rank() + 2) + q);
  }
};

// Depth-first even-path walk. on_house(h) fires after every non-matching
// edge, on_agent(a, last_m_edge) after every matching edge; either returns
// false to abort the whole search (a witness was emitted).
template <class OH, class OA>
struct Walker {
  Ctx& c;
  OH& on_house;
  OA& on_agent;

  bool at_house(int h) {
    c.tick();
    if (!on_house(h)) return false;
    if (c.memo_skip(c.house_state(h))) return true;
    for (int e : c.inst.house_edges(h)) {
      if (!c.in_m(e) || c.used[e]) continue;
      const Edge& ed = c.inst.edge(e);
      c.push(e);
      bool cont = at_agent(ed.agent, ed.rank, e);
      c.pop(e);
      if (!cont) return false;
    }
    return true;
  }

  // Arrived at agent a via matching edge of rank q; continuation keeps rank q.
  bool at_agent(int a, int q, int last_edge) {
    c.tick();
    if (!on_agent(a, last_edge)) return false;
    if (c.memo_skip(c.agent_state(a, q))) return true;
    for (int f : c.inst.agent_edges(a)) {
      if (c.in_m(f) || c.used[f] || c.inst.edge(f).rank != q) continue;
      c.push(f);
      bool cont = at_house(c.inst.edge(f).house);
      c.pop(f);
      if (!cont) return false;
    }
    return true;
  }

  bool start(int s) {
    c.push(s);
    bool cont = at_house(c.inst.edge(s).house);
    c.pop(s);
    return cont;
  }
};

template <class OH, class OA>
bool walk_from(Ctx& c, int start_edge, OH&& on_house, OA&& on_agent) {
  Walker<std::remove_reference_t<OH>, std::remove_reference_t<OA>> w{c, on_house, on_agent};
  return w.start(start_edge);
}

// Start-agent eligibility for witness kinds 1-3: unsaturated, or some
// matching edge strictly worse than the start edge.
bool eligible_start(const Ctx& c, int s) {
  const Edge& ed = c.inst.edge(s);
  if (!c.agent_saturated(ed.agent)) return true;
  for (int e : c.inst.agent_edges(ed.agent))
    if (c.in_m(e) && c.inst.edge(e).rank > ed.rank) return true;
  return false;
}

// Matching edge at a1 strictly worse than the start edge, not on the current
// path and not the extra excluded edge; lowest (rank, house) first.
std::optional<int> pick_aux(const Ctx& c, int a1, int start_rank, int exclude = -1) {
  for (int e : c.inst.agent_edges(a1)) {
    if (!c.in_m(e) || c.used[e] || e == exclude) continue;
    if (c.inst.edge(e).rank > start_rank) return e;
  }
  return std::nullopt;
}

std::optional<Witness> detect_type3(Ctx& c) {
  const Instance& inst = c.inst;
  // length-1 paths first: they need no search at all
  for (int s = 0; s < inst.edge_count(); ++s) {
    if (c.in_m(s)) continue;
    const Edge& ed = inst.edge(s);
    if (!c.house_unsaturated(ed.house) || !eligible_start(c, s)) continue;
    Witness w;
    w.kind = WitnessKind::TYPE3;
    w.path = {s};
    if (c.agent_saturated(ed.agent)) {
      auto aux = pick_aux(c, ed.agent, ed.rank, s);
      if (!aux) continue;
      w.aux_edge = aux;
    }
    return w;
  }
  std::unordered_set<uint64_t> memo;
  for (int s = 0; s < inst.edge_count(); ++s) {
    if (c.in_m(s) || !eligible_start(c, s)) continue;
    const Edge& ed = inst.edge(s);
    memo.clear();
    c.memo = &memo;
    std::optional<Witness> found;
    auto on_house = [&](int h) {
      if (!c.house_unsaturated(h)) return true;
      std::optional<int> aux;
      if (c.agent_saturated(ed.agent)) {
        aux = pick_aux(c, ed.agent, ed.rank);
        if (!aux) return true;
      }
      found = Witness{WitnessKind::TYPE3, c.path, {}, aux, std::nullopt};
      return false;
    };
    auto on_agent = [](int, int) { return true; };
    bool cont = walk_from(c, s, on_house, on_agent);
    c.memo = nullptr;
    if (!cont && found) return found;
  }
  return std::nullopt;
}

std::optional<Witness> detect_type4(Ctx& c) {
  const Instance& inst = c.inst;
  std::unordered_set<uint64_t> memo;
  for (int s = 0; s < inst.edge_count(); ++s) {
    if (c.in_m(s)) continue;
    const Edge& ed = inst.edge(s);
    const int a1 = ed.agent;
    const int r0 = ed.rank;
    memo.clear();
    c.memo = &memo;
    std::optional<Witness> found;
    auto on_house = [&](int h) {
      for (int e : inst.house_edges(h)) {
        if (!c.in_m(e) || c.used[e]) continue;
        if (inst.edge(e).agent != a1 || inst.edge(e).rank <= r0) continue;
        std::vector<int> path = c.path;
        path.push_back(e);
        found = Witness{WitnessKind::TYPE4, std::move(path), {}, std::nullopt, std::nullopt};
        return false;
      }
      return true;
    };
    auto on_agent = [](int, int) { return true; };
    bool cont = walk_from(c, s, on_house, on_agent);
    c.memo = nullptr;
    if (!cont && found) return found;
  }
  return std::nullopt;
}

// Candidate emissions are validated by applying them; with vertex revisits
// the per-agent rank-tuple deltas interact (an agent re-occurring inside the
// walk can net zero), so structural conditions alone are not enough.
bool strictly_beats(const Ctx& c, const Witness& w, bool weak) {
  BMatching better = apply_witness(c.inst, c.m, w);
  Verdict v = weak ? more_weakly_popular(c.inst, better, c.m).verdict
                   : more_popular(c.inst, better, c.m).verdict;
  return v == Verdict::FIRST_MORE_POPULAR;
}

// Kind-1 detection generalizes the written shape to an alternating walk with
// exactly one rank-drop junction: even path, matching edge into a_k, a
// strictly better non-matching edge out of a_k, then an even continuation
// ending at a losing agent, back at the start agent, or at an unsaturated
// house. With unit capacities everywhere this collapses to the literal
// (..., a_k, h_k, a_{k+1}); larger agent capacities need the longer walks
// and the coinciding-vertex cases (an agent can prefer the other side by
// gaining an extra edge, and the drop can land on the start agent itself).
// Every candidate is applied and compared before emission, so only the
// search space is generalized, never the meaning of a returned witness. The
// exhaustive oracle-agreement suite is the arbiter for this reading.
std::optional<Witness> detect_type1(Ctx& c, bool weak_sound) {
  const Instance& inst = c.inst;
  std::unordered_set<uint64_t> memo;
  for (int s = 0; s < inst.edge_count(); ++s) {
    if (c.in_m(s)) continue;
    const Edge& ed = inst.edge(s);
    const int a1 = ed.agent;
    const int r0 = ed.rank;
    memo.clear();
    c.memo = &memo;
    std::optional<Witness> found;

    auto emit = [&](std::optional<int> closing) -> bool {
      // closing: matching edge ending the walk at an agent, or nothing for
      // a walk ending at an unsaturated house. The start agent needs an aux
      // edge exactly when the walk leaves it one edge over capacity.
      std::optional<int> aux;
      bool closes_at_start = closing && inst.edge(*closing).agent == a1;
      if (!closes_at_start && c.agent_saturated(a1)) {
        aux = pick_aux(c, a1, r0, closing ? *closing : -1);
        if (!aux) return true;
      }
      std::vector<int> path = c.path;
      if (closing) path.push_back(*closing);
      Witness w{WitnessKind::TYPE1, std::move(path), {}, aux, std::nullopt};
      if (!strictly_beats(c, w, weak_sound)) return true;
      found = std::move(w);
      return false;
    };

    auto on_house = [&](int hkm1) {
      for (int e1 : inst.house_edges(hkm1)) {
        if (!c.in_m(e1) || c.used[e1]) continue;
        const int ak = inst.edge(e1).agent;
        const int re1 = inst.edge(e1).rank;
        c.push(e1);
        for (int f : inst.agent_edges(ak)) {
          if (c.in_m(f) || c.used[f] || inst.edge(f).rank >= re1) continue;
          c.push(f);
          // even continuation past the drop; every house and agent arrival
          // is a candidate walk end
          std::unordered_set<uint64_t> tail_memo;
          std::unordered_set<uint64_t>* saved = c.memo;
          c.memo = &tail_memo;
          auto tail_house = [&](int h) {
            if (c.house_unsaturated(h) && !emit(std::nullopt)) return false;
            for (int e2 : inst.house_edges(h)) {
              if (!c.in_m(e2) || c.used[e2]) continue;
              if (!emit(e2)) return false;
            }
            return true;
          };
          auto tail_agent = [](int, int) { return true; };
          Walker<decltype(tail_house), decltype(tail_agent)> tail{c, tail_house, tail_agent};
          bool cont = tail.at_house(inst.edge(f).house);
          c.memo = saved;
          c.pop(f);
          if (!cont) {
            c.pop(e1);
            return false;
          }
        }
        c.pop(e1);
      }
      return true;
    };
    auto on_agent = [](int, int) { return true; };
    bool cont = walk_from(c, s, on_house, on_agent);
    c.memo = nullptr;
    if (!cont && found) return found;
  }
  return std::nullopt;
}

std::optional<Witness> detect_type2(Ctx& c) {
  const Instance& inst = c.inst;
  std::vector<int> starts;
  for (int s = 0; s < inst.edge_count(); ++s)
    if (!c.in_m(s) && eligible_start(c, s)) starts.push_back(s);

  for (int s1 : starts) {
    const int a1 = inst.edge(s1).agent;
    const int r1 = inst.edge(s1).rank;
    std::optional<Witness> found;
    // outer enumeration must see every first path, so no memo here
    auto outer_agent = [&](int a, int) {
      if (a == a1) return true;
      const size_t len1 = c.path.size();
      for (int s2 : starts) {
        if (s2 == s1 || c.used[s2]) continue;
        const int a1b = inst.edge(s2).agent;
        if (a1b == a1 || a1b == a) continue;
        std::unordered_set<uint64_t> memo2;
        c.memo = &memo2;
        auto inner_agent = [&](int a2, int) {
          if (a2 != a) return true;
          std::optional<int> aux1, aux2;
          if (c.agent_saturated(a1)) {
            aux1 = pick_aux(c, a1, r1);
            if (!aux1) return true;
          }
          if (c.agent_saturated(a1b)) {
            aux2 = pick_aux(c, a1b, inst.edge(s2).rank);
            if (!aux2) return true;
          }
          std::vector<int> path1(c.path.begin(), c.path.begin() + len1);
          std::vector<int> path2(c.path.begin() + len1, c.path.end());
          found = Witness{WitnessKind::TYPE2, std::move(path1), std::move(path2), aux1, aux2};
          return false;
        };
        auto inner_house = [](int) { return true; };
        bool cont = walk_from(c, s2, inner_house, inner_agent);
        c.memo = nullptr;
        if (!cont && found) return false;
      }
      return true;
    };
    auto outer_house = [](int) { return true; };
    bool cont = walk_from(c, s1, outer_house, outer_agent);
    if (!cont && found) return found;
  }
  return std::nullopt;
}

}  // namespace

EvenPathReach find_even_paths(const Instance& inst, const BMatching& m, int start_edge,
                              const CertifyOptions& opts) {
  if (start_edge < 0 || start_edge >= inst.edge_count())
    fail(Errc::non_edge, "start edge id out of range");
  if (m.contains(start_edge)) fail(Errc::precondition, "start edge is in the matching");
  Ctx c(inst, m, opts.node_budget);
  EvenPathReach reach;
  reach.house_path.resize(inst.house_count());
  reach.agent_path.resize(inst.agent_count());
  std::unordered_set<uint64_t> memo;
  c.memo = &memo;
  auto on_house = [&](int h) {
    if (!reach.house_path[h]) reach.house_path[h] = c.path;
    return true;
  };
  auto on_agent = [&](int a, int) {
    if (!reach.agent_path[a]) reach.agent_path[a] = c.path;
    return true;
  };
  walk_from(c, start_edge, on_house, on_agent);
  return reach;
}

namespace {

std::optional<Witness> detect_kind(Ctx& c, WitnessKind kind, bool weak_sound) {
  switch (kind) {
    case WitnessKind::TYPE1:
      return detect_type1(c, weak_sound);
    case WitnessKind::TYPE2:
      return detect_type2(c);
    case WitnessKind::TYPE3:
      return detect_type3(c);
    case WitnessKind::TYPE4:
      return detect_type4(c);
  }
  fail(Errc::precondition, "unknown witness kind");
}

}  // namespace

std::optional<Witness> detect_witness(const Instance& inst, const BMatching& m, WitnessKind kind,
                                      const CertifyOptions& opts) {
  Ctx c(inst, m, opts.node_budget);
  return detect_kind(c, kind, /*weak_sound=*/false);
}

VerifyResult verify(const Instance& inst, const BMatching& m, VerifyMode mode,
                    const CertifyOptions& opts) {
  static constexpr WitnessKind kPopularOrder[] = {WitnessKind::TYPE3, WitnessKind::TYPE4,
                                                  WitnessKind::TYPE1, WitnessKind::TYPE2};
  static constexpr WitnessKind kWeakOrder[] = {WitnessKind::TYPE3, WitnessKind::TYPE4,
                                               WitnessKind::TYPE1};
  std::span<const WitnessKind> order =
      mode == VerifyMode::POPULAR ? std::span<const WitnessKind>(kPopularOrder)
                                  : std::span<const WitnessKind>(kWeakOrder);
  for (WitnessKind k : order) {
    Ctx c(inst, m, opts.node_budget);
    if (auto w = detect_kind(c, k, mode == VerifyMode::WEAK)) return {false, std::move(w)};
  }
  return {true, std::nullopt};
}

namespace {

[[noreturn]] void bad_witness(const std::string& why) { fail(Errc::witness_invalid, why); }

// Validates alternation and vertex continuity; returns the rank of each
// matching-edge/non-matching-edge junction at agents (pairs of positions
// (2i+1, 2i+2)).
struct PathShape {
  int start_agent = -1;
  int start_rank = 0;
  int last_agent = -1;   // agent of the final edge
  int last_house = -1;   // house of the final edge
  std::vector<std::pair<int, int>> agent_junction_ranks;  // (in-rank, out-rank)
};

PathShape trace_path(const Instance& inst, const BMatching& m, const std::vector<int>& path) {
  if (path.empty()) bad_witness("empty path");
  for (int e : path)
    if (e < 0 || e >= inst.edge_count()) bad_witness("path edge id out of range");
  if (m.contains(path[0])) bad_witness("path must start with a non-matching edge");
  PathShape shape;
  shape.start_agent = inst.edge(path[0]).agent;
  shape.start_rank = inst.edge(path[0]).rank;
  int cur_agent = shape.start_agent;
  int cur_house = inst.edge(path[0]).house;
  for (size_t i = 1; i < path.size(); ++i) {
    const Edge& ed = inst.edge(path[i]);
    if (i % 2 == 1) {
      if (!m.contains(path[i])) bad_witness("expected a matching edge at position " + std::to_string(i));
      if (ed.house != cur_house) bad_witness("path edges do not share a house");
      cur_agent = ed.agent;
    } else {
      if (m.contains(path[i])) bad_witness("expected a non-matching edge at position " + std::to_string(i));
      if (ed.agent != cur_agent) bad_witness("path edges do not share an agent");
      shape.agent_junction_ranks.emplace_back(inst.edge(path[i - 1]).rank, ed.rank);
      cur_house = ed.house;
    }
  }
  shape.last_agent = inst.edge(path.back()).agent;
  shape.last_house = inst.edge(path.back()).house;
  return shape;
}

struct Degrees {
  std::vector<int> agent, house;
};

Degrees matching_degrees(const Instance& inst, const BMatching& m) {
  Degrees d;
  d.agent.assign(inst.agent_count(), 0);
  d.house.assign(inst.house_count(), 0);
  for (int e : m.edge_ids()) {
    ++d.agent[inst.edge(e).agent];
    ++d.house[inst.edge(e).house];
  }
  return d;
}

void check_aux(const Instance& inst, const BMatching& m, int aux, int start_agent, int start_rank,
               const std::vector<int>& all_path_edges) {
  if (aux < 0 || aux >= inst.edge_count()) bad_witness("aux edge id out of range");
  if (!m.contains(aux)) bad_witness("aux edge must be a matching edge");
  if (inst.edge(aux).agent != start_agent) bad_witness("aux edge must be at the start agent");
  if (inst.edge(aux).rank <= start_rank) bad_witness("aux edge must rank below the start edge");
  for (int e : all_path_edges)
    if (e == aux) bad_witness("aux edge may not lie on the path");
}

void check_start_conditions(const Instance& inst, const BMatching& m, const Degrees& deg,
                            int start_agent, int start_rank, std::optional<int> aux,
                            const std::vector<int>& all_path_edges) {
  bool saturated = deg.agent[start_agent] >= inst.agent_capacity(start_agent);
  if (!saturated) {
    if (aux) bad_witness("aux edge present although the start agent is unsaturated");
    return;
  }
  if (!aux) bad_witness("saturated start agent requires an aux edge");
  check_aux(inst, m, *aux, start_agent, start_rank, all_path_edges);
}

}  // namespace

void check_witness(const Instance& inst, const BMatching& m, const Witness& w) {
  std::vector<int> all = w.path;
  all.insert(all.end(), w.second_path.begin(), w.second_path.end());
  if (w.aux_edge) all.push_back(*w.aux_edge);
  if (w.aux_edge2) all.push_back(*w.aux_edge2);
  std::vector<int> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    bad_witness("an edge occurs twice in the witness");

  const Degrees deg = matching_degrees(inst, m);
  std::vector<int> path_edges = w.path;
  path_edges.insert(path_edges.end(), w.second_path.begin(), w.second_path.end());

  switch (w.kind) {
    case WitnessKind::TYPE3: {
      if (!w.second_path.empty() || w.aux_edge2) bad_witness("TYPE3 carries a single path");
      if (w.path.size() % 2 != 1) bad_witness("TYPE3 path must end with a non-matching edge");
      PathShape s = trace_path(inst, m, w.path);
      for (auto [in, out] : s.agent_junction_ranks)
        if (in != out) bad_witness("even path requires equal ranks at interior agents");
      if (deg.house[s.last_house] >= inst.house_capacity(s.last_house))
        bad_witness("TYPE3 terminal house must be unsaturated");
      check_start_conditions(inst, m, deg, s.start_agent, s.start_rank, w.aux_edge, path_edges);
      break;
    }
    case WitnessKind::TYPE4: {
      if (!w.second_path.empty() || w.aux_edge || w.aux_edge2)
        bad_witness("TYPE4 carries a single path and no aux edge");
      if (w.path.size() % 2 != 0 || w.path.size() < 2)
        bad_witness("TYPE4 path must end with a matching edge");
      PathShape s = trace_path(inst, m, w.path);
      for (auto [in, out] : s.agent_junction_ranks)
        if (in != out) bad_witness("even path requires equal ranks at interior agents");
      if (s.last_agent != s.start_agent) bad_witness("TYPE4 path must return to its start agent");
      if (inst.edge(w.path.back()).rank <= s.start_rank)
        bad_witness("TYPE4 closing edge must rank below the start edge");
      break;
    }
    case WitnessKind::TYPE1: {
      if (!w.second_path.empty() || w.aux_edge2) bad_witness("TYPE1 carries a single path");
      if (w.path.size() < 3) bad_witness("TYPE1 needs an even path plus a rank drop");
      PathShape s = trace_path(inst, m, w.path);
      // exactly one junction downgrades the rank; everything else is even
      int drop_index = -1;
      for (size_t j = 0; j < s.agent_junction_ranks.size(); ++j) {
        auto [in_rank, out_rank] = s.agent_junction_ranks[j];
        if (in_rank > out_rank) {
          if (drop_index >= 0) bad_witness("TYPE1 allows a single rank drop");
          drop_index = static_cast<int>(j);
        } else if (in_rank != out_rank) {
          bad_witness("alternating walk may not upgrade the rank at an agent");
        }
      }
      if (drop_index < 0) bad_witness("TYPE1 needs a rank-dropping junction");
      int a1 = s.start_agent;
      bool closes_at_start = w.path.size() % 2 == 0 && s.last_agent == a1;
      if (w.path.size() % 2 == 1) {
        if (deg.house[s.last_house] >= inst.house_capacity(s.last_house))
          bad_witness("a house-terminated TYPE1 walk needs an unsaturated final house");
      }
      if (closes_at_start) {
        // the walk removes a matching edge at its start agent, so no aux is
        // needed for feasibility; an extra one is still acceptable
        if (w.aux_edge) check_aux(inst, m, *w.aux_edge, a1, s.start_rank, path_edges);
      } else {
        check_start_conditions(inst, m, deg, a1, s.start_rank, w.aux_edge, path_edges);
      }
      break;
    }
    case WitnessKind::TYPE2: {
      if (w.path.size() % 2 != 0 || w.path.empty() || w.second_path.size() % 2 != 0 ||
          w.second_path.empty())
        bad_witness("TYPE2 paths must end with matching edges");
      PathShape s1 = trace_path(inst, m, w.path);
      PathShape s2 = trace_path(inst, m, w.second_path);
      for (auto [in, out] : s1.agent_junction_ranks)
        if (in != out) bad_witness("even path requires equal ranks at interior agents");
      for (auto [in, out] : s2.agent_junction_ranks)
        if (in != out) bad_witness("even path requires equal ranks at interior agents");
      if (s1.last_agent != s2.last_agent) bad_witness("TYPE2 paths must share their terminal agent");
      if (w.path.back() == w.second_path.back())
        bad_witness("TYPE2 terminal matching edges must differ");
      int a = s1.last_agent;
      if (s1.start_agent == s2.start_agent || s1.start_agent == a || s2.start_agent == a)
        bad_witness("TYPE2 agents a_1, a, a'_1 must be pairwise different");
      check_start_conditions(inst, m, deg, s1.start_agent, s1.start_rank, w.aux_edge, path_edges);
      check_start_conditions(inst, m, deg, s2.start_agent, s2.start_rank, w.aux_edge2, path_edges);
      break;
    }
  }
}

BMatching apply_witness(const Instance& inst, const BMatching& m, const Witness& w) {
  check_witness(inst, m, w);
  std::vector<char> toggle(inst.edge_count(), 0);
  for (int e : w.path) toggle[e] ^= 1;
  for (int e : w.second_path) toggle[e] ^= 1;
  if (w.aux_edge) toggle[*w.aux_edge] ^= 1;
  if (w.aux_edge2) toggle[*w.aux_edge2] ^= 1;
  std::vector<int> result;
  result.reserve(m.size() + w.path.size());
  for (int e = 0; e < inst.edge_count(); ++e) {
    bool in = m.contains(e);
    if (toggle[e]) in = !in;
    if (in) result.push_back(e);
  }
  return BMatching::from_edge_ids(inst, std::move(result));
}

namespace {

void write_edge_line(const Instance& inst, const BMatching& m, int e, std::ostream& out) {
  const Edge& ed = inst.edge(e);
  out << inst.agent_name(ed.agent) << ' ' << inst.house_name(ed.house) << ' '
      << (m.contains(e) ? 'M' : 'N') << " rank=" << ed.rank << '\n';
}

}  // namespace

void serialize_witness(const Instance& inst, const BMatching& m, const Witness& w,
                       std::ostream& out) {
  out << "kind=" << static_cast<int>(w.kind) << '\n';
  if (w.kind == WitnessKind::TYPE2) {
    out << "path:\n";
    for (int e : w.path) write_edge_line(inst, m, e, out);
    if (w.aux_edge) {
      out << "aux: ";
      write_edge_line(inst, m, *w.aux_edge, out);
    }
    out << "path:\n";
    for (int e : w.second_path) write_edge_line(inst, m, e, out);
    if (w.aux_edge2) {
      out << "aux: ";
      write_edge_line(inst, m, *w.aux_edge2, out);
    }
  } else {
    for (int e : w.path) write_edge_line(inst, m, e, out);
    if (w.aux_edge) {
      out << "aux: ";
      write_edge_line(inst, m, *w.aux_edge, out);
    }
  }
}

std::string witness_to_text(const Instance& inst, const BMatching& m, const Witness& w) {
  std::ostringstream out;
  serialize_witness(inst, m, w, out);
  return out.str();
}

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int parse_edge_line(const Instance& inst, const BMatching& m, std::vector<std::string> tok,
                    int line_no) {
  if (tok.size() != 4)
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected '<a> <h> M|N rank=<r>'");
  auto a = inst.find_agent(tok[0]);
  auto h = inst.find_house(tok[1]);
  if (!a || !h)
    fail(Errc::unknown_vertex, "line " + std::to_string(line_no) + ": unknown vertex");
  int e = inst.find_edge(*a, *h);
  if (e < 0) fail(Errc::non_edge, "line " + std::to_string(line_no) + ": not an instance edge");
  bool claimed_m = tok[2] == "M";
  if (!claimed_m && tok[2] != "N")
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected M or N");
  if (claimed_m != m.contains(e))
    fail(Errc::witness_invalid,
         "line " + std::to_string(line_no) + ": M/N flag disagrees with the matching");
  if (tok[3].rfind("rank=", 0) != 0 || tok[3].substr(5) != std::to_string(inst.edge(e).rank))
    fail(Errc::witness_invalid, "line " + std::to_string(line_no) + ": rank disagrees with the instance");
  return e;
}

}  // namespace

Witness parse_witness(const Instance& inst, const BMatching& m, std::istream& in) {
  std::string line;
  int line_no = 0;
  Witness w;
  bool have_kind = false;
  int block = -1;  // -1: single path form; 0/1: TYPE2 blocks
  std::vector<int>* cur = &w.path;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_tokens(line);
    if (tok.empty()) continue;
    if (!have_kind) {
      if (tok.size() != 1 || tok[0].rfind("kind=", 0) != 0)
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 'kind=<n>'");
      int k = std::stoi(tok[0].substr(5));
      if (k < 1 || k > 4) fail(Errc::bad_value, "witness kind must be 1..4");
      w.kind = static_cast<WitnessKind>(k);
      have_kind = true;
      continue;
    }
    if (tok.size() == 1 && tok[0] == "path:") {
      if (w.kind != WitnessKind::TYPE2)
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": 'path:' only in TYPE2");
      ++block;
      if (block > 1) fail(Errc::parse_error, "TYPE2 has exactly two path blocks");
      cur = block == 0 ? &w.path : &w.second_path;
      continue;
    }
    if (tok[0] == "aux:") {
      tok.erase(tok.begin());
      int e = parse_edge_line(inst, m, tok, line_no);
      auto& slot = (w.kind == WitnessKind::TYPE2 && block == 1) ? w.aux_edge2 : w.aux_edge;
      if (slot) fail(Errc::parse_error, "line " + std::to_string(line_no) + ": duplicate aux line");
      slot = e;
      continue;
    }
    cur->push_back(parse_edge_line(inst, m, tok, line_no));
  }
  if (!have_kind) fail(Errc::parse_error, "missing 'kind=' line");
  check_witness(inst, m, w);
  return w;
}

Witness parse_witness_text(const Instance& inst, const BMatching& m, const std::string& text) {
  std::istringstream in(text);
  return parse_witness(inst, m, in);
}

}  // namespace popbm
