#pragma once

// Matching engine: maximum b-matchings by augmenting paths, partition
// matchings with improving sequences, alternating-reachability (E/O/U)
// labels, the d(A') exchange procedure, and the z-variants where class
// requirements are families of saturable sets carried implicitly by
// component graphs.
//
// All algorithms are single-threaded over immutable inputs; distinct calls
// are independent and thread-safe.

#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "popbm/instance.hpp"

namespace popbm {

// A bipartite graph with vertex capacities: an edge subset of an Instance
// together with capacity overrides. The vertex universe is always the whole
// instance; vertices without incident subset edges are inert.
struct CapGraph {
  const Instance* inst = nullptr;
  std::vector<int> edge_ids;  // sorted subset of instance edge ids
  std::vector<int> agent_cap, house_cap;
  std::vector<std::vector<int>> agent_adj, house_adj;  // instance edge ids

  static CapGraph whole(const Instance& inst);
  static CapGraph of_edges(const Instance& inst, std::vector<int> edge_ids,
                           std::vector<int> agent_cap, std::vector<int> house_cap);
  CapGraph restrict_agents(std::span<const int> agents) const;

  bool unit_agent_caps() const;
  bool contains_edge(int e) const;
};

// Throws unless every matching edge lies in the subgraph and all CapGraph
// capacities hold.
void require_feasible(const CapGraph& g, const BMatching& m);

// Maximum-cardinality b-matching by repeated augmenting-path search, agents
// scanned in declaration order; deterministic.
BMatching max_b_matching(const CapGraph& g);
// Same algorithm with shuffled scan and adjacency orders; used to probe
// invariance properties.
BMatching max_b_matching_randomized(const CapGraph& g, std::mt19937& rng);

// ---------------------------------------------------------------------------
// Partition matchings

struct PartitionSpec {
  std::vector<std::string> names;          // one per class
  std::vector<std::vector<int>> classes;   // sorted agent indices
  std::vector<int> quotas;                 // 0 <= k_i <= |A_i|

  // disjointness, coverage of all instance agents, quota bounds
  void validate(const Instance& inst) const;
  int class_of(int agent) const;  // index, or -1
};

// "class <name> <k> <agent...>" lines, '#' comments.
PartitionSpec parse_partition_spec(const Instance& inst, std::istream& in);
PartitionSpec parse_partition_spec_text(const Instance& inst, const std::string& text);
void serialize_partition_spec(const Instance& inst, const PartitionSpec& spec, std::ostream& out);

struct SequencePath {
  std::vector<int> edges;  // alternating, starts non-matching, ends matching
  int start_agent = -1;
  int end_agent = -1;
  int start_class = -1;
  int end_class = -1;
};

// Edge-disjoint chained alternating paths; applying the symmetric difference
// of all paths preserves cardinality and shifts one matched slot into the
// deficient class.
struct ImprovingSequence {
  std::vector<SequencePath> paths;
};

// Requires m maximum and some class below quota; exhaustive bounded search.
std::optional<ImprovingSequence> find_improving_sequence(const CapGraph& g, const BMatching& m,
                                                         const PartitionSpec& spec);

// Maximum matching meeting every class quota, or nothing when the improving
// sequence loop ends with requirements unmet.
std::optional<BMatching> partition_matching(const CapGraph& g, const PartitionSpec& spec);

// m ⊕ (all sequence paths); validates feasibility and preserved cardinality.
BMatching apply_sequence(const CapGraph& g, const BMatching& m, const ImprovingSequence& seq);

// ---------------------------------------------------------------------------
// Alternating-reachability labels (unit agent capacities)

enum class EouLabel { E, O, U };

struct EouLabeling {
  std::vector<EouLabel> agent, house;
};

// E = reachable at even edge distance (0 included) from some unsaturated
// vertex along an alternating path, O = odd distance, U = unreachable.
// A vertex reachable both ways is labeled E. m must be maximum.
EouLabeling eou_labels(const CapGraph& g, const BMatching& m);

// ---------------------------------------------------------------------------
// Saturable-set machinery

// d(A') = size of the largest B ⊆ A' saturated together by some maximum
// matching of the component graph; computed by the even-alternating-path
// exchange procedure. Unit agent capacities required.
int compute_d(const CapGraph& component, std::span<const int> agent_subset);

// True iff z is the matched agent set of some maximum matching of the
// component: |z| equals the maximum matching size and z is saturable.
bool z_membership(const CapGraph& component, std::span<const int> z);

// PartitionSpec plus one component graph per class; the family Z_i of
// admissible matched sets is carried implicitly as the component's maximum
// matchings. Quotas must equal the component maximum matching sizes.
struct ZSpec {
  PartitionSpec base;
  std::vector<CapGraph> components;

  void validate(const Instance& inst) const;
};

// "class"/"component <class-name> <instance-file>" lines; the loader maps a
// file name to its parsed Instance. Component edges are resolved by vertex
// name against the main instance; capacities come from the component file.
ZSpec parse_zspec(const Instance& inst, std::istream& in,
                  const std::function<Instance(const std::string&)>& load_instance);

std::optional<ImprovingSequence> find_z_improving_sequence(const CapGraph& g, const BMatching& m,
                                                           const ZSpec& zspec);

// Maximum matching whose matched agents contain a member of every class's
// Z-family, or nothing when no z-improving sequence exists while unmet.
std::optional<BMatching> z_partition_matching(const CapGraph& g, const ZSpec& zspec);

}  // namespace popbm
