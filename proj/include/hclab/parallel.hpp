#pragma once

#include <cstddef>
#include <functional>

namespace hclab {

// Worker count for data-parallel loops. 1 means run inline.
void set_thread_count(unsigned n);
unsigned thread_count();

// Calls body(i) for i in [0, n). Iterations must write to disjoint slots;
// callers reduce afterwards in index order so results do not depend on
// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hclab
