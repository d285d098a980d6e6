#pragma once

#include <cstddef>
#include <cstdint>

namespace gradeacc::batch {

/// Execution policy for embarrassingly parallel sweeps. Every job writes to
/// its own slot, so serial and parallel execution produce identical results.
enum class Exec {
    serial,
    parallel,  // OpenMP; falls back to serial when compiled without it
};

template <typename Fn>
void for_each_index(std::size_t n, Exec mode, Fn&& fn) {
#ifdef _OPENMP
    if (mode == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) {
        fn(i);
    }
}

}  // namespace gradeacc::batch
