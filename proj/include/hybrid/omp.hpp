#pragma once

// Include this instead of <omp.h> so the library still builds without OpenMP.

#if defined(_OPENMP)
#include <omp.h>
namespace hybrid {
constexpr bool use_omp = true;
} // namespace hybrid
#else
namespace hybrid {
constexpr bool use_omp = false;
} // namespace hybrid
inline int omp_get_thread_num() { return 0; }
inline int omp_get_max_threads() { return 1; }
inline void omp_set_num_threads(int) {}
#endif

namespace hybrid {

// 0 keeps the OpenMP default (OMP_NUM_THREADS or the core count).
inline void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

} // namespace hybrid

#include <exception>
#include <mutex>

namespace hybrid {

// Exceptions must not escape an OpenMP region. Capture the first one inside
// the loop body and rethrow it after the region ends.
class ParallelErrors {
public:
    template <typename Fn>
    void run(Fn&& fn) noexcept {
        try {
            fn();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!first_) first_ = std::current_exception();
        }
    }

    void rethrow() const {
        if (first_) std::rethrow_exception(first_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr first_;
};

} // namespace hybrid
