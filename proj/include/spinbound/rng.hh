#pragma once

#include <cstdint>

namespace spinbound
{
    // SplitMix64 used in counter mode: the k-th output of the stream keyed
    // by `key` is mix(key + (k + 1) * gamma), so any draw can be computed
    // independently of every other draw.
    inline constexpr std::uint64_t splitmix_gamma = 0x9e3779b97f4a7c15ULL;

    constexpr auto splitmix64_mix(std::uint64_t z) -> std::uint64_t
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    class CounterRng
    {
        public:
            constexpr explicit CounterRng(std::uint64_t key) : _key(key) { }

            constexpr auto key() const -> std::uint64_t { return _key; }

            constexpr auto at(std::uint64_t counter) const -> std::uint64_t
            {
                return splitmix64_mix(_key + (counter + 1) * splitmix_gamma);
            }

            /// Independent stream for a sub-task (trial index, graph index, ...).
            constexpr auto derive(std::uint64_t tag) const -> CounterRng
            {
                return CounterRng(splitmix64_mix(_key ^ splitmix64_mix(tag + splitmix_gamma)));
            }

            /// Uniform in [0, bound) by rejection, consuming counters from
            /// `counter` upwards; `counter` is advanced past what was used.
            constexpr auto uniform_below(std::uint64_t bound, std::uint64_t & counter) const -> std::uint64_t
            {
                // 2^64 mod bound; accepting x >= it leaves a multiple of bound values
                auto threshold = (std::uint64_t(0) - bound) % bound;
                for (;;) {
                    auto x = at(counter++);
                    if (x >= threshold)
                        return x % bound;
                }
            }

        private:
            std::uint64_t _key;
    };
}
