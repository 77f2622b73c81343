#pragma once

// doctest-side conveniences shared by the unit test files.

#include "doctest.h"
#include "generators.hpp"

namespace testutil {

// A returned witness must strictly beat the matching it indicts under the
// mode's comparison; checked through apply_witness and the instance-core
// comparison operators.
inline void check_witness_beats(const popbm::Instance& in, const popbm::BMatching& m,
                                const popbm::Witness& w, popbm::VerifyMode mode) {
  popbm::BMatching better = popbm::apply_witness(in, m, w);
  if (mode == popbm::VerifyMode::POPULAR) {
    CHECK(popbm::more_popular(in, better, m).verdict == popbm::Verdict::FIRST_MORE_POPULAR);
  } else {
    CHECK(popbm::more_weakly_popular(in, better, m).verdict ==
          popbm::Verdict::FIRST_MORE_POPULAR);
  }
}

inline popbm::BMatching bm(const popbm::Instance& in, std::vector<int> ids) {
  return popbm::BMatching::from_edge_ids(in, std::move(ids));
}

}  // namespace testutil
