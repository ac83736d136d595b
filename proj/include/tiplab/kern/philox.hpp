// SPDX-License-Identifier: Apache-2.0
#pragma once

// Philox4x32-10 counter-based generator. Each Monte Carlo realization owns a
// stream keyed from (master seed, stream id); the counter is the step index.
// Draws are therefore reproducible and independent of execution order, which
// is what makes the parallel ensembles bitwise deterministic.

#include "tiplab/kern/pack.hpp"

#include <cstdint>

namespace tiplab::kern {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

struct PhiloxKey {
    std::uint32_t k0 = 0, k1 = 0;
};

struct PhiloxOut {
    std::uint32_t v[4];
};

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Per-stream key derived from the master seed.
inline PhiloxKey stream_key(std::uint64_t master_seed, std::uint64_t stream) {
    const std::uint64_t mixed =
        splitmix64(master_seed + 0x9E3779B97F4A7C15ull * (stream + 1));
    return {static_cast<std::uint32_t>(mixed),
            static_cast<std::uint32_t>(mixed >> 32)};
}

/// Scalar reference: counter occupies words 0..1, words 2..3 are zero.
inline PhiloxOut philox4x32_10(std::uint64_t counter, PhiloxKey key) {
    std::uint32_t c0 = static_cast<std::uint32_t>(counter);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
    std::uint32_t c2 = 0, c3 = 0;
    std::uint32_t k0 = key.k0, k1 = key.k1;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = (std::uint64_t)kPhiloxM0 * c0;
        const std::uint64_t p1 = (std::uint64_t)kPhiloxM1 * c2;
        const std::uint32_t hi0 = (std::uint32_t)(p0 >> 32), lo0 = (std::uint32_t)p0;
        const std::uint32_t hi1 = (std::uint32_t)(p1 >> 32), lo1 = (std::uint32_t)p1;
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {{c0, c1, c2, c3}};
}

/// Pack form: one 32-bit word per 64-bit lane (zero-extended), independent
/// keys per lane, shared counter. Matches the scalar route bit for bit.
template <class L>
struct PhiloxPack {
    typename L::i c0, c1, c2, c3;
};

template <class L>
inline PhiloxPack<L> philox4x32_10_pack(std::uint64_t counter, typename L::i k0,
                                        typename L::i k1) {
    const auto mask32 = L::iset(0xFFFFFFFFull);
    auto c0 = L::iset(counter & 0xFFFFFFFFull);
    auto c1 = L::iset(counter >> 32);
    auto c2 = L::iset(0);
    auto c3 = L::iset(0);
    const auto m0 = L::iset(kPhiloxM0);
    const auto m1 = L::iset(kPhiloxM1);
    const auto w0 = L::iset(kPhiloxW0);
    const auto w1 = L::iset(kPhiloxW1);
    for (int round = 0; round < 10; ++round) {
        auto p0 = L::mulu32(m0, c0);
        auto p1 = L::mulu32(m1, c2);
        auto hi0 = L::srli(p0, 32);
        auto lo0 = L::andi(p0, mask32);
        auto hi1 = L::srli(p1, 32);
        auto lo1 = L::andi(p1, mask32);
        c0 = L::xori(L::xori(hi1, c1), k0);
        c1 = lo1;
        c2 = L::xori(L::xori(hi0, c3), k1);
        c3 = lo0;
        k0 = L::andi(L::addi(k0, w0), mask32);
        k1 = L::andi(L::addi(k1, w1), mask32);
    }
    return {c0, c1, c2, c3};
}

/// (0,1) double from two 32-bit words, 52 significant bits.
inline double u01_from_words(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t w = ((std::uint64_t)hi << 32) | lo;
    return ((double)(w >> 12) + 0.5) * 0x1p-52;
}

} // namespace tiplab::kern
