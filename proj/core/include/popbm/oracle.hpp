#pragma once

// Brute-force definitional ground truth. Enumerates every feasible b-matching
// house by house, decides popularity and weak popularity straight from the
// comparison operators, and solves tiny exact-3-cover / 3-SAT instances by
// exhaustive search. This module is deliberately dumb: it exists to arbitrate
// everything clever elsewhere.

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "popbm/instance.hpp"

namespace popbm {

struct EnumOptions {
  // Upper bound on the house-choice product (deg(h)+1 over houses); the
  // enumeration refuses to start past it so failures are predictable from
  // the instance alone.
  long long budget = 10'000'000;
};

// The product over houses of (incident-edge-count + 1), saturated at a large
// sentinel to avoid overflow.
long long enumeration_bound(const Instance& inst);

// Yields every capacity-feasible edge subset exactly once, houses in
// declaration order, incident edges in sorted order, exclusion branch first
// (so the empty matching comes first). The callback returns false to stop.
// Throws Errc::budget_exceeded when the bound is over budget.
void enumerate_b_matchings(const Instance& inst,
                           const std::function<bool(std::span<const int>)>& visit,
                           const EnumOptions& opts = {});

enum class OracleMode { POPULAR, WEAK };

struct OracleVerdict {
  bool holds = false;
  std::optional<BMatching> counterexample;  // beats the query, first in enumeration order
};

OracleVerdict brute_check(const Instance& inst, const BMatching& m, OracleMode mode,
                          const EnumOptions& opts = {});

// First matching in enumeration order that no enumerated matching beats.
std::optional<BMatching> brute_find(const Instance& inst, OracleMode mode,
                                    const EnumOptions& opts = {});

// ---------------------------------------------------------------------------
// Tiny NP-complete source problems for the reduction round-trip tests.

struct X3CTriple {
  std::string name;
  std::array<std::string, 3> elems;
};

struct X3CInstance {
  std::vector<std::string> ground_set;  // size divisible by 3
  std::vector<X3CTriple> triples;
};

// "element <id>" and "set <name> <e1> <e2> <e3>" lines, '#' comments.
X3CInstance parse_x3c(std::istream& in);
X3CInstance parse_x3c_text(const std::string& text);
void serialize_x3c(const X3CInstance& x, std::ostream& out);

// Exhaustive subset search; |ground_set| <= 12. Returned triple names are
// pairwise disjoint and cover the ground set exactly.
std::optional<std::vector<std::string>> solve_x3c(const X3CInstance& x);

struct CnfFormula {
  int variable_count = 0;
  std::vector<std::array<int, 3>> clauses;  // nonzero literals, |lit| <= variable_count
};

// DIMACS restricted to 3-literal clauses.
CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs_text(const std::string& text);
void serialize_dimacs(const CnfFormula& f, std::ostream& out);

bool clause_satisfied(const std::array<int, 3>& clause, const std::vector<bool>& assignment);
bool formula_satisfied(const CnfFormula& f, const std::vector<bool>& assignment);

// Exhaustive truth table; variable_count <= 20.
std::optional<std::vector<bool>> solve_3sat(const CnfFormula& f);

}  // namespace popbm
