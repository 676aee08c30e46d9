#include "elliptest/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace elliptest {

namespace {
thread_local bool inside_parallel_region = false;
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) {
    hw = 1;
  }
  const char* env = std::getenv("ELLIPTEST_THREADS");
  if (env == nullptr || *env == '\0') {
    return hw;
  }
  const long requested = std::strtol(env, nullptr, 10);
  if (requested <= 0) {
    return hw;
  }
  return static_cast<int>(requested < hw ? requested : hw);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  if (count <= 0) {
    return;
  }
  const int workers = inside_parallel_region ? 1 : std::min(worker_count(), count);
  if (workers == 1) {
    const bool was_inside = inside_parallel_region;
    inside_parallel_region = true;
    try {
      for (int i = 0; i < count; ++i) {
        fn(i);
      }
    } catch (...) {
      inside_parallel_region = was_inside;
      throw;
    }
    inside_parallel_region = was_inside;
    return;
  }

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  auto body = [&]() {
    inside_parallel_region = true;
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) {
        break;
      }
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back(body);
  }
  body();
  inside_parallel_region = false;
  for (auto& t : pool) {
    t.join();
  }
  for (auto& err : errors) {
    if (err) {
      std::rethrow_exception(err);
    }
  }
}

}  // namespace elliptest
