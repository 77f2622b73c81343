#pragma once

// Bipartite preference instances, b-matchings, and the popularity arithmetic
// everything else is built on: per-agent signatures with lexicographic
// comparison, padded rank tuples, and the normalized per-agent gain used for
// weak popularity.
//
// All values are immutable after construction and every operation is a pure
// function of its inputs, so concurrent use needs no synchronisation.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "popbm/errors.hpp"

namespace popbm {

struct Edge {
  int agent = -1;  // agent index
  int house = -1;  // house index
  int rank = 0;    // >= 1, lower is better
};

class InstanceBuilder;

class Instance {
 public:
  Instance() = default;  // the empty instance

  // Reads the line-oriented instance format:
  //   agent <id> <capacity>
  //   house <id> <capacity>
  //   edge <agent-id> <house-id> <rank>
  // '#' starts a comment. Vertex ids are opaque strings mapped to dense
  // indices internally; outputs always use the original strings.
  static Instance parse(std::istream& in);
  static Instance parse_text(const std::string& text);

  // Emits vertices in first-seen order and edges sorted by (agent, rank,
  // house); parse(serialize(x)) reproduces x exactly.
  void serialize(std::ostream& out) const;
  std::string to_text() const;

  int agent_count() const { return static_cast<int>(agent_names_.size()); }
  int house_count() const { return static_cast<int>(house_names_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::string& agent_name(int a) const { return agent_names_[a]; }
  const std::string& house_name(int h) const { return house_names_[h]; }
  int agent_capacity(int a) const { return agent_cap_[a]; }
  int house_capacity(int h) const { return house_cap_[h]; }

  // Index lookup by id; throws Errc::unknown_vertex / unknown_agent.
  int agent_index(const std::string& name) const;
  int house_index(const std::string& name) const;
  std::optional<int> find_agent(const std::string& name) const;
  std::optional<int> find_house(const std::string& name) const;

  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const int> agent_edges(int a) const { return agent_adj_[a]; }
  std::span<const int> house_edges(int h) const { return house_adj_[h]; }

  // Edge id for (agent, house), or -1.
  int find_edge(int agent, int house) const;

  int max_rank() const { return max_rank_; }           // r
  int max_agent_degree() const { return max_agent_degree_; }  // d
  bool has_ties() const { return has_ties_; }

 private:
  friend class InstanceBuilder;
  void finalize();  // sorts edges, builds adjacency, derives r/d/ties

  std::vector<std::string> agent_names_, house_names_;
  std::vector<int> agent_cap_, house_cap_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> agent_adj_, house_adj_;
  int max_rank_ = 0;
  int max_agent_degree_ = 0;
  bool has_ties_ = false;
};

// Incremental construction used by parsers, gadget builders and tests.
class InstanceBuilder {
 public:
  InstanceBuilder& add_agent(const std::string& name, int capacity);
  InstanceBuilder& add_house(const std::string& name, int capacity);
  InstanceBuilder& add_edge(const std::string& agent, const std::string& house, int rank);
  Instance build();

 private:
  Instance inst_;
  bool built_ = false;
};

// An edge subset with every vertex degree within capacity. Stores sorted edge
// ids of its instance plus a membership bitmap.
class BMatching {
 public:
  BMatching() = default;

  // Validates feasibility: every id is an instance edge (ids in range,
  // no duplicates) and all capacities hold.
  static BMatching from_edge_ids(const Instance& inst, std::vector<int> edge_ids);

  // Resolves (agent-id, house-id) pairs against the instance; reports
  // DUPLICATE_PAIR, NON_EDGE and CAPACITY_EXCEEDED with the offending names.
  static BMatching validate(const Instance& inst,
                            const std::vector<std::pair<std::string, std::string>>& pairs);

  // Trusted fast path for internal enumeration; ids must be sorted unique and
  // feasible.
  static BMatching unchecked(const Instance& inst, std::span<const int> edge_ids);

  const std::vector<int>& edge_ids() const { return ids_; }
  int size() const { return static_cast<int>(ids_.size()); }
  bool contains(int edge_id) const {
    return bits_[static_cast<size_t>(edge_id) >> 6] >> (edge_id & 63) & 1u;
  }

  bool operator==(const BMatching& other) const { return ids_ == other.ids_; }

 private:
  std::vector<int> ids_;        // sorted edge ids
  std::vector<uint64_t> bits_;  // membership bitmap over instance edges
};

// Matching file: one "<agent-id> <house-id>" pair per line, '#' comments.
BMatching parse_matching(const Instance& inst, std::istream& in);
BMatching parse_matching_text(const Instance& inst, const std::string& text);
void serialize_matching(const Instance& inst, const BMatching& m, std::ostream& out);
std::string matching_to_text(const Instance& inst, const BMatching& m);

// Free-function alias for BMatching::validate.
inline BMatching validate_matching(const Instance& inst,
                                   const std::vector<std::pair<std::string, std::string>>& pairs) {
  return BMatching::validate(inst, pairs);
}

enum class Ordering { LESS, EQUAL, GREATER };

// counts[i] = number of matched edges of rank i+1 at the agent.
struct Signature {
  std::vector<int> counts;
};

Signature signature(const Instance& inst, const BMatching& m, int agent);
Ordering compare_signatures(const Signature& s1, const Signature& s2);

// Sorted ranks of an edge set at one agent, padded with max_rank+1 up to the
// instance-wide maximum agent degree.
struct RankTuple {
  std::vector<int> values;
};

RankTuple rank_tuple(const Instance& inst, int agent, std::span<const int> edge_ids);

enum class Verdict { FIRST_MORE_POPULAR, SECOND_MORE_POPULAR, TIE };

struct PopularityComparison {
  int prefer_first = 0;
  int prefer_second = 0;
  Verdict verdict = Verdict::TIE;
};

PopularityComparison more_popular(const Instance& inst, const BMatching& m1, const BMatching& m2);

// Normalized gain: positive when the agent does better in m1 (lower ranks).
// This is the negation of the raw signum-difference of the two private rank
// tuples, so that "first matching wins" always means a positive number.
int agent_gain(const Instance& inst, const BMatching& m1, const BMatching& m2, int agent);

struct WeakComparison {
  std::vector<int> per_agent_gain;  // indexed by agent
  long long total = 0;
  Verdict verdict = Verdict::TIE;
};

WeakComparison more_weakly_popular(const Instance& inst, const BMatching& m1, const BMatching& m2);

// Span-based fast paths for enumeration loops; edge id spans must be sorted,
// unique and feasible for the instance.
Verdict more_popular_span(const Instance& inst, std::span<const int> m1, std::span<const int> m2);
Verdict more_weakly_popular_span(const Instance& inst, std::span<const int> m1,
                                 std::span<const int> m2);

}  // namespace popbm
