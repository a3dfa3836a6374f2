#ifndef PSEUDOMCF_PARALLEL_HPP_
#define PSEUDOMCF_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace pseudomcf {

// Process-wide worker count used by node-parallel loops. Values < 1 are clamped to 1.
void set_thread_count(int threads);
int thread_count();

// Calls body(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker; body must only write state owned by index i. Results never depend on
// the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pseudomcf

#endif  // PSEUDOMCF_PARALLEL_HPP_
