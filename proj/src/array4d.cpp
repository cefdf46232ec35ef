#include "dtcwt/array4d.hpp"

#include <atomic>
#include <cmath>

namespace dtcwt {

void validate_volume(const Volume4D& v) {
    const Shape4& s = v.shape();
    for (int d = 0; d < 4; ++d) {
        if (s[d] <= 0 || s[d] % 2 != 0)
            throw std::invalid_argument("volume extents must be positive and even, got " + shape_str(s));
    }
    for (double x : v.vec())
        if (!std::isfinite(x)) throw std::invalid_argument("volume contains non-finite samples");
}

namespace {
int g_threads = 1;
}

int worker_threads() { return g_threads; }

void set_worker_threads(int n) { g_threads = n < 1 ? 1 : n; }

void parallel_for(long long n, int threads, const std::function<void(long long)>& fn) {
    if (threads <= 1 || n < 2) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    int nw = static_cast<int>(std::min<long long>(threads, n));
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                long long i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

double GaussianSampler::next_uniform() {
    // splitmix64 step
    state_ += 0x9e3779b97f4a7c15ULL;
    unsigned long long z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return (static_cast<double>(z >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double GaussianSampler::operator()() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

}  // namespace dtcwt
