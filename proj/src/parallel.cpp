#include "hlab/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace hlab {

namespace {
int g_threads = 1;
constexpr std::size_t kChunks = 256;
}  // namespace

void set_thread_count(int n) { g_threads = n < 1 ? 1 : n; }
int thread_count() { return g_threads; }

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t chunks = std::min(kChunks, n);
    const std::size_t step = (n + chunks - 1) / chunks;
    if (g_threads <= 1) {
        for (std::size_t c = 0; c * step < n; ++c)
            fn(c * step, std::min(n, (c + 1) * step));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            const std::size_t lo = c * step;
            if (lo >= n) return;
            fn(lo, std::min(n, lo + step));
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min<std::size_t>(g_threads, (n + step - 1) / step);
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

double parallel_sum(std::size_t n,
                    const std::function<double(std::size_t)>& term) {
    if (n == 0) return 0.0;
    const std::size_t chunks = std::min(kChunks, n);
    const std::size_t step = (n + chunks - 1) / chunks;
    const std::size_t nchunk = (n + step - 1) / step;
    std::vector<double> partial(nchunk, 0.0);
    parallel_chunks(n, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> vals;
        vals.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) vals.push_back(term(i));
        partial[lo / step] = pairwise_sum(vals);
    });
    return pairwise_sum(partial);
}

}  // namespace hlab
