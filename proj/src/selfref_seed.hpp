#pragma once

#include <cstddef>
#include <vector>

#include "logiclab/machine.hpp"

// Build-internal surface of the self-describing seed. Public callers go
// through selfref.hpp or useq.hpp.

namespace logiclab::seed_detail {

struct SeedLayout {
  MachineProgram program;
  size_t loader_start = 0;  // entry redirected here makes the seed print its own code
  size_t driver_start = 0;  // first instruction of the appended runtime block
};

// Seed with the shape [entry jump][stream writer][loader][driver]. The
// emitted description covers the whole program, driver included, so the seed
// prints its own code when entered at the loader. With a driver the entry
// jumps to it and the rebuild path lies dormant; with none the entry jumps to
// the loader and the seed is the plain self-printer. Driver jump targets are
// driver-relative; register roles inside the driver are free because the
// writer and driver never run in the same pass.
SeedLayout recursion_seed(const std::vector<Instr>& driver);

}  // namespace logiclab::seed_detail
