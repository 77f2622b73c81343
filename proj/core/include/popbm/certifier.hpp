#pragma once

// Even-path machinery and the four witness-path detectors. A witness is a
// typed path configuration whose symmetric difference with the matching
// produces a strictly more (weakly) popular matching; verify() reports a
// matching popular / weakly popular exactly when no witness of the relevant
// kinds exists.
//
// Detection is exhaustive depth-first search over edge-distinct paths
// (vertices may repeat, edges may not), deterministic in canonical edge
// order. Worst-case exponential; correctness at desk scale is the contract,
// enforced by oracle agreement in the test suite.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "popbm/instance.hpp"

namespace popbm {

enum class WitnessKind { TYPE1 = 1, TYPE2 = 2, TYPE3 = 3, TYPE4 = 4 };
enum class VerifyMode { POPULAR, WEAK };

struct Witness {
  WitnessKind kind = WitnessKind::TYPE3;
  std::vector<int> path;         // edge ids in path order
  std::vector<int> second_path;  // TYPE2 only: the partner path, same orientation
  std::optional<int> aux_edge;   // matching edge dropped at the first path's start agent
  std::optional<int> aux_edge2;  // TYPE2 only: same for the second path's start agent
};

struct CertifyOptions {
  long long node_budget = 50'000'000;  // DFS step budget per detect call
};

// Per-vertex even-path reachability from one non-matching start edge, with
// one representative path per reachable vertex. Houses are reached after a
// non-matching edge, agents after a matching edge.
struct EvenPathReach {
  std::vector<std::optional<std::vector<int>>> house_path;
  std::vector<std::optional<std::vector<int>>> agent_path;
};

EvenPathReach find_even_paths(const Instance& inst, const BMatching& m, int start_edge,
                              const CertifyOptions& opts = {});

// First witness of the given kind in canonical search order, or nothing.
std::optional<Witness> detect_witness(const Instance& inst, const BMatching& m, WitnessKind kind,
                                      const CertifyOptions& opts = {});

struct VerifyResult {
  bool holds = false;
  std::optional<Witness> witness;
};

// POPULAR checks kinds 3,4,1,2 in that order; WEAK checks 3,4,1. Witnesses
// returned by a WEAK verification strictly beat the matching under the
// aggregated comparison: kind-1 candidates whose terminal agent re-occurs
// inside the even path can net zero there and are skipped.
VerifyResult verify(const Instance& inst, const BMatching& m, VerifyMode mode,
                    const CertifyOptions& opts = {});

// Checks every structural invariant of the witness against (inst, m);
// throws Errc::witness_invalid with a reason when one fails.
void check_witness(const Instance& inst, const BMatching& m, const Witness& w);

// m ⊕ (path ∪ second_path ∪ aux edges). Validates the witness first; the
// result is feasible and strictly beats m under the kind's comparison.
BMatching apply_witness(const Instance& inst, const BMatching& m, const Witness& w);

// Witness text: "kind=<n>", then edge lines "<agent> <house> M|N rank=<r>";
// TYPE2 wraps each constituent in a "path:" block; aux edges appear as
// "aux: <agent> <house> M rank=<r>" after their path.
void serialize_witness(const Instance& inst, const BMatching& m, const Witness& w,
                       std::ostream& out);
std::string witness_to_text(const Instance& inst, const BMatching& m, const Witness& w);
Witness parse_witness(const Instance& inst, const BMatching& m, std::istream& in);
Witness parse_witness_text(const Instance& inst, const BMatching& m, const std::string& text);

}  // namespace popbm
