#include "hclab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hclab {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned n) { g_threads = std::max(1u, n); }
unsigned thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned t = std::min<std::size_t>(g_threads.load(), n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!first_error) first_error = std::current_exception();
          next = n;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hclab
