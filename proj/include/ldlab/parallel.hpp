#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace ldlab {

/// Thread count resolution: explicit value > 0 wins, otherwise the
/// LDP_LAB_THREADS environment variable, otherwise 1.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LDP_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

/// Runs body(i) for i in [0, count) on up to n_threads threads.
///
/// Each index writes only to its own slot of whatever output array the caller
/// owns, and any randomness must come from a stream derived per index, so the
/// result is identical for every thread count. Reductions are done by the
/// caller afterwards, in index order. The first exception thrown by any index
/// is rethrown on the calling thread after all workers join.
template <typename Body>
void parallel_for(std::size_t count, int n_threads, Body&& body) {
    n_threads = resolve_threads(n_threads);
    if (n_threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Neumaier compensated sum over values in index order; used for reductions
/// that must be bit-identical no matter how the work was scheduled.
inline double compensated_sum(const std::vector<double>& values) {
    double sum = 0.0;
    double comp = 0.0;
    for (const double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

}  // namespace ldlab
