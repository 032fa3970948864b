#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace batopt {

namespace detail {

// splitmix64 finalizer; used only to decorrelate seed material.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t id) noexcept
{
    return mix64(mix64(parent) ^ mix64(id + 0x632be59bd9b4e019ULL));
}

} // namespace detail

/// Reproducible random stream identified by (master_seed, stream_id).
///
/// Substreams are derived by hashing, so agent i at iteration t can draw
/// from `RngStream(seed, tag).substream(i).substream(t)` without touching
/// any shared generator state. The engine is splitmix64, which makes a
/// fresh substream cost a couple of multiplications.
class RngStream
{
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed),
          stream_id_(stream_id),
          key_(detail::derive_key(master_seed, stream_id)),
          state_(key_)
    {
    }

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    RngStream substream(std::uint64_t id) const
    {
        return RngStream(master_seed_, stream_id_, detail::derive_key(key_, id));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n).
    std::size_t index(std::size_t n)
    {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(*this);
    }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(*this); }

private:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint64_t key)
        : master_seed_(master_seed), stream_id_(stream_id), key_(key), state_(key)
    {
    }

    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t state_;
};

/// Stream tags keep the roles of different draws apart under one seed.
namespace stream {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t agents = 2;
inline constexpr std::uint64_t simulation = 3;
inline constexpr std::uint64_t replicates = 4;
} // namespace stream

} // namespace batopt
