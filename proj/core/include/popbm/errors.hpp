#pragma once

#include <stdexcept>
#include <string>

namespace popbm {

// One error type for the whole library; the code tells callers (and the CLI
// exit-code mapping) what class of failure they are looking at.
enum class Errc {
  parse_error,        // malformed input text, message carries the line number
  duplicate_vertex,   // agent/house declared twice
  duplicate_edge,     // two edges on the same (agent, house) pair
  unknown_vertex,     // edge or matching references an undeclared id
  bad_value,          // capacity or rank < 1, malformed number
  non_edge,           // matching pair is not an instance edge
  capacity_exceeded,  // matching violates b(v)
  duplicate_pair,     // matching lists a pair twice
  length_mismatch,    // signature comparison on different lengths
  unknown_agent,      // operation addressed to a non-agent
  not_incident,       // edge set handed to rank_tuple is not at the agent
  budget_exceeded,    // enumeration or search budget blown
  size_limit,         // oracle desk-scale limit exceeded
  precondition,       // operation precondition violated
  not_maximum,        // a maximum matching was required
  witness_invalid,    // witness fails its own invariants
  discrepancy,        // certifier/oracle/translation disagreement; surfaced, never repaired
  io_error,           // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace popbm
