#pragma once

#include <cstddef>
#include <functional>

namespace swidel::detail {

/// Worker count: `requested` if positive else the machine default, capped
/// by the SWIDEL_THREADS environment variable; 1 when deterministic.
int resolve_threads(int requested, bool deterministic);

/// Runs fn(0..count-1) across up to `threads` workers with static slicing.
/// Slices write to disjoint slots, so results do not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace swidel::detail
