#pragma once

//! Minimal fork-join helper. Work items write into preallocated slots indexed
//! by item number and results are reduced in index order, so outputs are
//! byte-identical regardless of the worker count. ELLIPTEST_THREADS caps the
//! number of workers (0 or unset means the hardware concurrency).

#include <functional>

namespace elliptest {

//! Worker count: ELLIPTEST_THREADS clamped to [1, hardware_concurrency],
//! re-read from the environment on every call.
int worker_count();

//! Run fn(0..count-1) across workers. Nested calls run inline on the calling
//! thread, so only the outermost loop of a pipeline fans out. The first
//! exception (lowest index) is rethrown after all workers join.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace elliptest
