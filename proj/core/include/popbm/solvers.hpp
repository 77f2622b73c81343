#pragma once

// End-to-end constructive solvers for two-rank instances: the rank split
// into (g1, g2), the partition-matching pipeline for no-ties instances, and
// the z-partition pipeline when ties occur among rank-2 edges. Every
// produced matching is gated through the weak-popularity certifier; a
// rejection is surfaced as a discrepancy, never repaired.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "popbm/certifier.hpp"
#include "popbm/instance.hpp"
#include "popbm/matching.hpp"

namespace popbm {

// g1: rank-1 edges with b1(a)=1, b1(h)=b(h).
// g2: rank-2 edges with b2(a)=1, b2(h)=max(0, b(h)-deg_E1(h)); the clamp at
// zero covers houses fully demanded at rank one.
struct RankSplit {
  CapGraph g1, g2;
};

// Requires every edge rank to be 1 or 2.
RankSplit split_ranks(const Instance& inst);

struct SolverReport {
  std::optional<BMatching> result;
  std::vector<std::string> trace;  // one phase record per line
};

// Two-rank, no-ties solver; requires b(a)=2 for every agent and at most one
// edge per rank per agent. When a matching is returned it has passed
// verify(WEAK); a NONE propagates a partition-matching failure.
SolverReport algorithm_a(const Instance& inst);

// Partition construction for the tied variant: maximum g2-matching,
// alternating-reachability labels, classes of interchangeable agents grouped
// by shared reachable houses, per-class component graphs and quotas.
struct APrimePartition {
  ZSpec zspec;
  BMatching m2;             // the maximum g2-matching used
  int grouped_classes = 0;  // label-derived classes; the remainder class is last
};

// Requires b(a)=2 for every agent, at most one rank-1 edge per agent; ties
// among rank-2 edges are allowed.
APrimePartition build_aprime_partition(const Instance& inst);

// Tied two-rank solver: z-partition matching on g1, then per-class
// reassembly of component matchings saturating exactly the matched members.
SolverReport algorithm_a_prime(const Instance& inst);

// Matching file plus a "# trace:" comment block.
void serialize_report(const Instance& inst, const SolverReport& report, std::ostream& out);
std::string report_to_text(const Instance& inst, const SolverReport& report);

}  // namespace popbm
