#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lcl {

// Thrown when a search or enumeration exceeds one of its configured caps.
struct CapExceeded : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline auto splitmix64(std::uint64_t x) -> std::uint64_t
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive hash of a sequence of words; used to key randomness by
// (seed, vertex, index, ...) instead of by evaluation order.
inline auto mix_words(std::initializer_list<std::uint64_t> words) -> std::uint64_t
{
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto w : words)
        h = splitmix64(h ^ splitmix64(w + 0x632be59bd9b4e019ULL));
    return h;
}

// Small deterministic generator. std::mt19937_64 is portable but the standard
// distributions are not, so bounded draws go through uniform_below.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    auto next() -> std::uint64_t
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    auto uniform_below(std::uint64_t bound) -> std::uint64_t
    {
        if (bound == 0)
            throw std::invalid_argument("uniform_below: empty range");
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    auto uniform01() -> double { return (next() >> 11) * 0x1.0p-53; }

    template <typename T>
    auto shuffle(std::vector<T> & v) -> void
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform_below(i)]);
    }

private:
    std::uint64_t state_;
};

// Counter-based per-vertex random tapes: word(v, k) is the k-th 64-bit word of
// vertex v's string. Tapes are implicitly infinite, so "requesting more bits"
// is just reading a larger k.
struct RandomSource
{
    std::uint64_t seed = 0;

    auto word(std::uint64_t vertex, std::uint64_t index) const -> std::uint64_t
    {
        return mix_words({seed, vertex, index});
    }
};

inline auto parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> & body) -> void
{
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t workers = std::min<std::size_t>(threads, count);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers)
                body(i);
        });
    for (auto & t : pool)
        t.join();
}

class Stopwatch
{
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    auto seconds() const -> double
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace lcl
