#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace holoq {

enum class Execution { serial, parallel };

struct ParallelOptions {
    Execution execution = Execution::parallel;
    int workers = 0;  // 0: OpenMP default
};

inline int available_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// out[i] = f(i) for i in [0, n). Results land by index, so the output does not
// depend on the worker count. If several calls throw, the exception of the
// lowest index is rethrown after the loop.
template <class F>
auto map_indexed(std::size_t n, F&& f, const ParallelOptions& par = {}) {
    using T = std::decay_t<decltype(f(std::size_t{}))>;
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);

    auto body = [&](std::size_t i) {
        try {
            slots[i].emplace(f(i));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

#ifdef _OPENMP
    if (par.execution == Execution::parallel && n > 1) {
        const int workers = par.workers > 0 ? par.workers : omp_get_max_threads();
        const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) body(i);
    }
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace holoq
