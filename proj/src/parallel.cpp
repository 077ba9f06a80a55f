#include "resonance_atlas/parallel.hpp"

#include "resonance_atlas/errors.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace resonance_atlas {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("RESONANCE_ATLAS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

int& threads_setting() {
  static int n = initial_threads();
  return n;
}

} // namespace

int thread_count() { return threads_setting(); }

void set_thread_count(int n) {
  if (n < 1) throw DomainError("thread count must be >= 1");
  threads_setting() = n;
}

namespace detail {

void run_indexed(std::size_t n, int threads, void (*call)(void*, std::size_t), void* ctx) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < count; ++i) call(ctx, static_cast<std::size_t>(i));
}

} // namespace detail

} // namespace resonance_atlas
