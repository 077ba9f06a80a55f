#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace resonance_atlas {

/// Every parallel kernel keeps a serial reference path with identical
/// arithmetic; results are merged by index so both paths agree bitwise.
enum class Execution { serial, parallel };

/// Thread count used by parallel kernels.  Defaults to RESONANCE_ATLAS_THREADS
/// when set, else the OpenMP default.
int thread_count();
void set_thread_count(int n);

namespace detail {
void run_indexed(std::size_t n, int threads, void (*call)(void*, std::size_t), void* ctx);
}

/// Calls body(i) for i in [0, n).  With Execution::parallel the indices are
/// spread over thread_count() OpenMP threads.  If any call throws, the
/// exception of the smallest failing index is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  struct Ctx {
    Body* body;
    std::vector<std::exception_ptr>* errors;
  } ctx{&body, &errors};
  detail::run_indexed(
      n, thread_count(),
      [](void* p, std::size_t i) {
        auto* c = static_cast<Ctx*>(p);
        try {
          (*c->body)(i);
        } catch (...) {
          (*c->errors)[i] = std::current_exception();
        }
      },
      &ctx);
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

} // namespace resonance_atlas
