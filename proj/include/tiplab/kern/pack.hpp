// SPDX-License-Identifier: Apache-2.0
#pragma once

// Lane-pack abstraction for the hot arithmetic kernels. Every kernel is
// written once against this interface and instantiated twice: with
// `lane_scalar` (the reference) and with `lane_avx2`. Both instantiations
// perform the same IEEE operations lane by lane, so their results are
// required to agree bitwise; the kernel tests assert exactly that.
//
// Masks are carried in the floating lane type with the sign bit deciding
// selection, mirroring blendv semantics.

#include <cstdint>
#include <cstring>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace tiplab::kern {

struct lane_scalar {
    using f = double;
    using i = std::uint64_t;
    static constexpr int width = 1;

    static f set(double c) { return c; }
    static f load(const double* p) { return *p; }
    static void store(double* p, f v) { *p = v; }

    static f add(f a, f b) { return a + b; }
    static f sub(f a, f b) { return a - b; }
    static f mul(f a, f b) { return a * b; }
    static f div(f a, f b) { return a / b; }
    static f sqrt(f a) { return __builtin_sqrt(a); }
    static f floor(f a) { return __builtin_floor(a); }
    static f max(f a, f b) { return a > b ? a : b; }
    static f min(f a, f b) { return a < b ? a : b; }

    static i icast(f a) {
        i r;
        std::memcpy(&r, &a, 8);
        return r;
    }
    static f fcast(i a) {
        f r;
        std::memcpy(&r, &a, 8);
        return r;
    }

    static f cmplt(f a, f b) { return fcast(a < b ? ~0ull : 0ull); }
    static f cmple(f a, f b) { return fcast(a <= b ? ~0ull : 0ull); }
    static f cmpgt(f a, f b) { return fcast(a > b ? ~0ull : 0ull); }
    static f cmpge(f a, f b) { return fcast(a >= b ? ~0ull : 0ull); }
    static f cmpeq(f a, f b) { return fcast(a == b ? ~0ull : 0ull); }

    // sign-bit select, as blendv does
    static f select(f mask, f a, f b) { return (icast(mask) >> 63) ? a : b; }
    static f andf(f a, f b) { return fcast(icast(a) & icast(b)); }
    static f orf(f a, f b) { return fcast(icast(a) | icast(b)); }

    static i iset(std::uint64_t c) { return c; }
    static i iload(const std::uint64_t* p) { return *p; }
    static i srli(i a, int k) { return a >> k; }
    static i slli(i a, int k) { return a << k; }
    static i andi(i a, i b) { return a & b; }
    static i ori(i a, i b) { return a | b; }
    static i xori(i a, i b) { return a ^ b; }
    static i addi(i a, i b) { return a + b; }
    // 32x32 -> 64 of the low dwords, as mul_epu32 does
    static i mulu32(i a, i b) {
        return (std::uint64_t)(std::uint32_t)a * (std::uint64_t)(std::uint32_t)b;
    }
    // exact for 0 <= v < 2^52
    static f u52_to_f(i v) { return (double)v; }
};

#if defined(__AVX2__)
struct lane_avx2 {
    using f = __m256d;
    using i = __m256i;
    static constexpr int width = 4;

    static f set(double c) { return _mm256_set1_pd(c); }
    static f load(const double* p) { return _mm256_loadu_pd(p); }
    static void store(double* p, f v) { _mm256_storeu_pd(p, v); }

    static f add(f a, f b) { return _mm256_add_pd(a, b); }
    static f sub(f a, f b) { return _mm256_sub_pd(a, b); }
    static f mul(f a, f b) { return _mm256_mul_pd(a, b); }
    static f div(f a, f b) { return _mm256_div_pd(a, b); }
    static f sqrt(f a) { return _mm256_sqrt_pd(a); }
    static f floor(f a) { return _mm256_floor_pd(a); }
    static f max(f a, f b) { return _mm256_max_pd(a, b); }
    static f min(f a, f b) { return _mm256_min_pd(a, b); }

    static i icast(f a) { return _mm256_castpd_si256(a); }
    static f fcast(i a) { return _mm256_castsi256_pd(a); }

    static f cmplt(f a, f b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
    static f cmple(f a, f b) { return _mm256_cmp_pd(a, b, _CMP_LE_OQ); }
    static f cmpgt(f a, f b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
    static f cmpge(f a, f b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
    static f cmpeq(f a, f b) { return _mm256_cmp_pd(a, b, _CMP_EQ_OQ); }

    static f select(f mask, f a, f b) { return _mm256_blendv_pd(b, a, mask); }
    static f andf(f a, f b) { return _mm256_and_pd(a, b); }
    static f orf(f a, f b) { return _mm256_or_pd(a, b); }

    static i iset(std::uint64_t c) { return _mm256_set1_epi64x((long long)c); }
    static i iload(const std::uint64_t* p) {
        return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
    }
    static i srli(i a, int k) { return _mm256_srli_epi64(a, k); }
    static i slli(i a, int k) { return _mm256_slli_epi64(a, k); }
    static i andi(i a, i b) { return _mm256_and_si256(a, b); }
    static i ori(i a, i b) { return _mm256_or_si256(a, b); }
    static i xori(i a, i b) { return _mm256_xor_si256(a, b); }
    static i addi(i a, i b) { return _mm256_add_epi64(a, b); }
    static i mulu32(i a, i b) { return _mm256_mul_epu32(a, b); }

    static f u52_to_f(i v) {
        // or in 2^52's exponent, subtract 2^52: exact for v < 2^52
        const i magic = iset(0x4330000000000000ull);
        return sub(fcast(ori(v, magic)), set(4503599627370496.0));
    }
};
#endif // __AVX2__

} // namespace tiplab::kern
