#pragma once

// Hardness gadget compilers: exact-3-cover instances become popularity
// gadgets (two ranks, agent capacities at most 2, house capacities 1), and
// 3-CNF formulas become weak-popularity gadgets (three ranks, capacities at
// most 3, no ties). Both directions of solution translation are provided;
// translation failures on certified inputs signal a discrepancy and are
// surfaced, never repaired.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "popbm/instance.hpp"
#include "popbm/oracle.hpp"

namespace popbm {

struct X3CGadget {
  X3CInstance source;
  Instance instance;
  std::vector<int> element_house;               // per ground-set element
  std::vector<std::array<int, 5>> set_agents;   // per triple: a_{i,1..5}
  std::vector<std::array<int, 2>> set_houses;   // per triple: (h_i, h'_i)
  std::vector<int> g_houses;                    // m - |K|/3 spare houses
};

// Requires |K| divisible by 3 and m >= |K|/3 triples.
X3CGadget build_x3c_gadget(const X3CInstance& x);

// The canonical matching of an exact cover: covered elements via rank-1
// edges, both a_{i,4} edges everywhere, one spare house per non-cover
// triple. Throws when the cover is not exact.
BMatching cover_to_matching(const X3CGadget& g, const std::vector<std::string>& cover);

// Extracts { T_i : a_{i,1..3} all matched via rank-1 edges } and checks it
// is an exact cover; callers must have certified the matching popular first.
std::vector<std::string> matching_to_cover(const X3CGadget& g, const BMatching& m);

void write_x3c_sidecar(const X3CGadget& g, std::ostream& out);

struct SatGadget {
  CnfFormula source;
  Instance instance;
  std::vector<int> r;                            // per variable: max occurrence count
  std::vector<std::vector<int>> var_agents;      // per variable: a_{i,1..2r(i)}
  std::vector<std::vector<int>> p_houses, pp_houses, b_houses, g_houses;
  std::vector<std::array<int, 3>> clause_agents;
  std::vector<int> clause_house;
  std::vector<std::array<int, 3>> occ_house;     // per clause, per literal slot
};

// Requires 3-literal clauses and every variable occurring at least once.
SatGadget build_3sat_gadget(const CnfFormula& f);

// The canonical matching of a satisfying assignment: the chosen-parity
// variable agents take all their edges, one true literal per clause takes
// its rank-1 and rank-2 edges, then a sweep adds every rank-1 edge whose
// endpoints are both unsaturated.
BMatching assignment_to_matching(const SatGadget& g, const std::vector<bool>& assignment);

// f(p_i)=1 iff all p'_{i,·} houses are matched to variable-i agents; the
// result is checked to satisfy the formula.
std::vector<bool> matching_to_assignment(const SatGadget& g, const BMatching& m);

void write_sat_sidecar(const SatGadget& g, std::ostream& out);

}  // namespace popbm
