#include "popbm/instance.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace popbm {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

int parse_positive_int(const std::string& tok, int line_no, const char* what) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad " + what + " '" + tok + "'");
  }
  if (pos != tok.size())
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad " + what + " '" + tok + "'");
  if (v < 1)
    fail(Errc::bad_value,
         "line " + std::to_string(line_no) + ": " + what + " must be >= 1, got " + tok);
  if (v > 1'000'000)
    fail(Errc::bad_value, "line " + std::to_string(line_no) + ": " + what + " too large");
  return static_cast<int>(v);
}

}  // namespace

void Instance::finalize() {
  std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
    if (x.agent != y.agent) return x.agent < y.agent;
    if (x.rank != y.rank) return x.rank < y.rank;
    return x.house < y.house;
  });
  agent_adj_.assign(agent_names_.size(), {});
  house_adj_.assign(house_names_.size(), {});
  max_rank_ = 0;
  has_ties_ = false;
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const Edge& ed = edges_[e];
    agent_adj_[ed.agent].push_back(e);
    house_adj_[ed.house].push_back(e);
    max_rank_ = std::max(max_rank_, ed.rank);
  }
  max_agent_degree_ = 0;
  for (int a = 0; a < agent_count(); ++a) {
    max_agent_degree_ = std::max(max_agent_degree_, static_cast<int>(agent_adj_[a].size()));
    // equal ranks at one agent form a tie; per-agent edge lists are sorted by rank
    for (size_t i = 1; i < agent_adj_[a].size(); ++i)
      if (edges_[agent_adj_[a][i]].rank == edges_[agent_adj_[a][i - 1]].rank) has_ties_ = true;
  }
}

Instance Instance::parse(std::istream& in) {
  InstanceBuilder b;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "agent" && tok.size() == 3) {
        b.add_agent(tok[1], parse_positive_int(tok[2], line_no, "capacity"));
      } else if (tok[0] == "house" && tok.size() == 3) {
        b.add_house(tok[1], parse_positive_int(tok[2], line_no, "capacity"));
      } else if (tok[0] == "edge" && tok.size() == 4) {
        b.add_edge(tok[1], tok[2], parse_positive_int(tok[3], line_no, "rank"));
      } else {
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 'agent', 'house' or 'edge' line");
      }
    } catch (const Error& e) {
      if (e.code() == Errc::parse_error || e.code() == Errc::bad_value) throw;
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return b.build();
}

Instance Instance::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

void Instance::serialize(std::ostream& out) const {
  for (int a = 0; a < agent_count(); ++a)
    out << "agent " << agent_names_[a] << ' ' << agent_cap_[a] << '\n';
  for (int h = 0; h < house_count(); ++h)
    out << "house " << house_names_[h] << ' ' << house_cap_[h] << '\n';
  for (const Edge& e : edges_)
    out << "edge " << agent_names_[e.agent] << ' ' << house_names_[e.house] << ' ' << e.rank
        << '\n';
}

std::string Instance::to_text() const {
  std::ostringstream out;
  serialize(out);
  return out.str();
}

int Instance::agent_index(const std::string& name) const {
  if (auto i = find_agent(name)) return *i;
  fail(Errc::unknown_agent, "unknown agent '" + name + "'");
}

int Instance::house_index(const std::string& name) const {
  if (auto i = find_house(name)) return *i;
  fail(Errc::unknown_vertex, "unknown house '" + name + "'");
}

std::optional<int> Instance::find_agent(const std::string& name) const {
  for (int a = 0; a < agent_count(); ++a)
    if (agent_names_[a] == name) return a;
  return std::nullopt;
}

std::optional<int> Instance::find_house(const std::string& name) const {
  for (int h = 0; h < house_count(); ++h)
    if (house_names_[h] == name) return h;
  return std::nullopt;
}

int Instance::find_edge(int agent, int house) const {
  for (int e : agent_adj_[agent])
    if (edges_[e].house == house) return e;
  return -1;
}

InstanceBuilder& InstanceBuilder::add_agent(const std::string& name, int capacity) {
  if (capacity < 1) fail(Errc::bad_value, "agent '" + name + "' capacity must be >= 1");
  if (inst_.find_agent(name)) fail(Errc::duplicate_vertex, "duplicate agent '" + name + "'");
  inst_.agent_names_.push_back(name);
  inst_.agent_cap_.push_back(capacity);
  return *this;
}

InstanceBuilder& InstanceBuilder::add_house(const std::string& name, int capacity) {
  if (capacity < 1) fail(Errc::bad_value, "house '" + name + "' capacity must be >= 1");
  if (inst_.find_house(name)) fail(Errc::duplicate_vertex, "duplicate house '" + name + "'");
  inst_.house_names_.push_back(name);
  inst_.house_cap_.push_back(capacity);
  return *this;
}

InstanceBuilder& InstanceBuilder::add_edge(const std::string& agent, const std::string& house,
                                           int rank) {
  if (rank < 1) fail(Errc::bad_value, "rank must be >= 1");
  auto a = inst_.find_agent(agent);
  if (!a) fail(Errc::unknown_vertex, "unknown agent '" + agent + "'");
  auto h = inst_.find_house(house);
  if (!h) fail(Errc::unknown_vertex, "unknown house '" + house + "'");
  for (const Edge& e : inst_.edges_)
    if (e.agent == *a && e.house == *h)
      fail(Errc::duplicate_edge, "duplicate edge (" + agent + ", " + house + ")");
  inst_.edges_.push_back(Edge{*a, *h, rank});
  return *this;
}

Instance InstanceBuilder::build() {
  if (built_) fail(Errc::precondition, "InstanceBuilder::build called twice");
  built_ = true;
  inst_.finalize();
  return std::move(inst_);
}

BMatching BMatching::unchecked(const Instance& inst, std::span<const int> edge_ids) {
  BMatching m;
  m.ids_.assign(edge_ids.begin(), edge_ids.end());
  m.bits_.assign((inst.edge_count() + 63) / 64 + 1, 0);
  for (int e : m.ids_) m.bits_[static_cast<size_t>(e) >> 6] |= uint64_t{1} << (e & 63);
  return m;
}

BMatching BMatching::from_edge_ids(const Instance& inst, std::vector<int> edge_ids) {
  std::sort(edge_ids.begin(), edge_ids.end());
  for (size_t i = 0; i < edge_ids.size(); ++i) {
    if (edge_ids[i] < 0 || edge_ids[i] >= inst.edge_count())
      fail(Errc::non_edge, "edge id " + std::to_string(edge_ids[i]) + " out of range");
    if (i > 0 && edge_ids[i] == edge_ids[i - 1])
      fail(Errc::duplicate_pair, "edge id " + std::to_string(edge_ids[i]) + " listed twice");
  }
  std::vector<int> adeg(inst.agent_count(), 0), hdeg(inst.house_count(), 0);
  for (int e : edge_ids) {
    const Edge& ed = inst.edge(e);
    if (++adeg[ed.agent] > inst.agent_capacity(ed.agent))
      fail(Errc::capacity_exceeded, "capacity exceeded at agent '" + inst.agent_name(ed.agent) + "'");
    if (++hdeg[ed.house] > inst.house_capacity(ed.house))
      fail(Errc::capacity_exceeded, "capacity exceeded at house '" + inst.house_name(ed.house) + "'");
  }
  return unchecked(inst, edge_ids);
}

BMatching BMatching::validate(const Instance& inst,
                              const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<int> ids;
  ids.reserve(pairs.size());
  for (const auto& [an, hn] : pairs) {
    auto a = inst.find_agent(an);
    if (!a) fail(Errc::unknown_vertex, "unknown agent '" + an + "'");
    auto h = inst.find_house(hn);
    if (!h) fail(Errc::unknown_vertex, "unknown house '" + hn + "'");
    int e = inst.find_edge(*a, *h);
    if (e < 0) fail(Errc::non_edge, "(" + an + ", " + hn + ") is not an instance edge");
    for (int seen : ids)
      if (seen == e) fail(Errc::duplicate_pair, "pair (" + an + ", " + hn + ") listed twice");
    ids.push_back(e);
  }
  return from_edge_ids(inst, std::move(ids));
}

BMatching parse_matching(const Instance& inst, std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok.size() != 2)
      fail(Errc::parse_error,
           "line " + std::to_string(line_no) + ": expected '<agent> <house>'");
    pairs.emplace_back(tok[0], tok[1]);
  }
  return BMatching::validate(inst, pairs);
}

BMatching parse_matching_text(const Instance& inst, const std::string& text) {
  std::istringstream in(text);
  return parse_matching(inst, in);
}

void serialize_matching(const Instance& inst, const BMatching& m, std::ostream& out) {
  // edge ids are already sorted by (agent, rank, house); emit by (agent, house)
  std::vector<int> ids = m.edge_ids();
  std::sort(ids.begin(), ids.end(), [&](int x, int y) {
    const Edge& ex = inst.edge(x);
    const Edge& ey = inst.edge(y);
    if (ex.agent != ey.agent) return ex.agent < ey.agent;
    return ex.house < ey.house;
  });
  for (int e : ids)
    out << inst.agent_name(inst.edge(e).agent) << ' ' << inst.house_name(inst.edge(e).house)
        << '\n';
}

std::string matching_to_text(const Instance& inst, const BMatching& m) {
  std::ostringstream out;
  serialize_matching(inst, m, out);
  return out.str();
}

Signature signature(const Instance& inst, const BMatching& m, int agent) {
  if (agent < 0 || agent >= inst.agent_count())
    fail(Errc::unknown_agent, "agent index " + std::to_string(agent) + " out of range");
  Signature s;
  s.counts.assign(inst.max_rank(), 0);
  for (int e : inst.agent_edges(agent))
    if (m.contains(e)) ++s.counts[inst.edge(e).rank - 1];
  return s;
}

Ordering compare_signatures(const Signature& s1, const Signature& s2) {
  if (s1.counts.size() != s2.counts.size())
    fail(Errc::length_mismatch, "signature lengths differ");
  for (size_t i = 0; i < s1.counts.size(); ++i) {
    if (s1.counts[i] > s2.counts[i]) return Ordering::GREATER;
    if (s1.counts[i] < s2.counts[i]) return Ordering::LESS;
  }
  return Ordering::EQUAL;
}

RankTuple rank_tuple(const Instance& inst, int agent, std::span<const int> edge_ids) {
  if (agent < 0 || agent >= inst.agent_count())
    fail(Errc::unknown_agent, "agent index " + std::to_string(agent) + " out of range");
  RankTuple t;
  t.values.reserve(inst.max_agent_degree());
  for (int e : edge_ids) {
    if (inst.edge(e).agent != agent)
      fail(Errc::not_incident, "edge " + std::to_string(e) + " is not incident to the agent");
    t.values.push_back(inst.edge(e).rank);
  }
  std::sort(t.values.begin(), t.values.end());
  t.values.resize(inst.max_agent_degree(), inst.max_rank() + 1);
  return t;
}

namespace {

inline int sgn(int x) { return (x > 0) - (x < 0); }

// Lexicographic comparison of the two signatures restricted to one agent,
// computed straight off the per-agent edge list. Returns +1 when m1 wins.
int compare_agent(const Instance& inst, int agent, const auto& in_m1, const auto& in_m2) {
  // counts per rank are compared rank-by-rank; the agent's edges are sorted
  // by rank, so walk both lists in lockstep.
  std::span<const int> edges = inst.agent_edges(agent);
  size_t i = 0;
  while (i < edges.size()) {
    int rank = inst.edge(edges[i]).rank;
    int c1 = 0, c2 = 0;
    for (; i < edges.size() && inst.edge(edges[i]).rank == rank; ++i) {
      c1 += in_m1(edges[i]);
      c2 += in_m2(edges[i]);
    }
    if (c1 != c2) return c1 > c2 ? 1 : -1;
  }
  return 0;
}

// Normalized gain at one agent: signum-sum over the padded sorted rank
// tuples of the private edges, oriented so positive means m1 is better.
int gain_agent(const Instance& inst, int agent, const auto& in_m1, const auto& in_m2) {
  // ranks of m1-only and m2-only edges, in nondecreasing order (edge list is
  // rank-sorted already)
  std::array<int, 64> buf1{}, buf2{};
  std::vector<int> big1, big2;
  int n1 = 0, n2 = 0;
  std::span<const int> edges = inst.agent_edges(agent);
  bool big = edges.size() > buf1.size();
  if (big) {
    big1.reserve(edges.size());
    big2.reserve(edges.size());
  }
  for (int e : edges) {
    bool a = in_m1(e), b = in_m2(e);
    if (a == b) continue;
    if (a) {
      if (big) big1.push_back(inst.edge(e).rank); else buf1[n1] = inst.edge(e).rank;
      ++n1;
    } else {
      if (big) big2.push_back(inst.edge(e).rank); else buf2[n2] = inst.edge(e).rank;
      ++n2;
    }
  }
  const int pad = inst.max_rank() + 1;
  const int d = inst.max_agent_degree();
  int total = 0;
  for (int i = 0; i < d; ++i) {
    int x = i < n1 ? (big ? big1[i] : buf1[i]) : pad;
    int y = i < n2 ? (big ? big2[i] : buf2[i]) : pad;
    total += sgn(y - x);  // positive when m1's i-th private rank is better
  }
  return total;
}

struct SpanMembership {
  // m must stay alive; spans are sorted
  std::span<const int> m;
  bool operator()(int e) const { return std::binary_search(m.begin(), m.end(), e); }
};

}  // namespace

PopularityComparison more_popular(const Instance& inst, const BMatching& m1, const BMatching& m2) {
  PopularityComparison r;
  auto in1 = [&](int e) { return m1.contains(e); };
  auto in2 = [&](int e) { return m2.contains(e); };
  for (int a = 0; a < inst.agent_count(); ++a) {
    int c = compare_agent(inst, a, in1, in2);
    if (c > 0) ++r.prefer_first;
    if (c < 0) ++r.prefer_second;
  }
  r.verdict = r.prefer_first > r.prefer_second   ? Verdict::FIRST_MORE_POPULAR
              : r.prefer_second > r.prefer_first ? Verdict::SECOND_MORE_POPULAR
                                                 : Verdict::TIE;
  return r;
}

int agent_gain(const Instance& inst, const BMatching& m1, const BMatching& m2, int agent) {
  if (agent < 0 || agent >= inst.agent_count())
    fail(Errc::unknown_agent, "agent index " + std::to_string(agent) + " out of range");
  return gain_agent(
      inst, agent, [&](int e) { return m1.contains(e); }, [&](int e) { return m2.contains(e); });
}

WeakComparison more_weakly_popular(const Instance& inst, const BMatching& m1,
                                   const BMatching& m2) {
  WeakComparison r;
  r.per_agent_gain.resize(inst.agent_count());
  for (int a = 0; a < inst.agent_count(); ++a) {
    r.per_agent_gain[a] = agent_gain(inst, m1, m2, a);
    r.total += r.per_agent_gain[a];
  }
  r.verdict = r.total > 0   ? Verdict::FIRST_MORE_POPULAR
              : r.total < 0 ? Verdict::SECOND_MORE_POPULAR
                            : Verdict::TIE;
  return r;
}

Verdict more_popular_span(const Instance& inst, std::span<const int> m1, std::span<const int> m2) {
  SpanMembership in1{m1}, in2{m2};
  int pf = 0, ps = 0;
  for (int a = 0; a < inst.agent_count(); ++a) {
    int c = compare_agent(inst, a, in1, in2);
    if (c > 0) ++pf;
    if (c < 0) ++ps;
  }
  return pf > ps ? Verdict::FIRST_MORE_POPULAR
         : ps > pf ? Verdict::SECOND_MORE_POPULAR
                   : Verdict::TIE;
}

Verdict more_weakly_popular_span(const Instance& inst, std::span<const int> m1,
                                 std::span<const int> m2) {
  SpanMembership in1{m1}, in2{m2};
  long long total = 0;
  for (int a = 0; a < inst.agent_count(); ++a) total += gain_agent(inst, a, in1, in2);
  return total > 0 ? Verdict::FIRST_MORE_POPULAR
         : total < 0 ? Verdict::SECOND_MORE_POPULAR
                     : Verdict::TIE;
}

}  // namespace popbm
