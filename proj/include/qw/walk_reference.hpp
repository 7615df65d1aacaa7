#pragma once

#include "qw/walk.hpp"

namespace qw::walk::reference {

// Serial map-based implementation of the walk, kept deliberately simple and
// independent of the sorted-array engine. Used by tests and the benchmark as
// the correctness baseline.
LatticeState evolve(const WalkConfig& cfg);

}  // namespace qw::walk::reference
