// SPDX-License-Identifier: Apache-2.0
#pragma once

// Branch-free exp/log/cos+sin over the lane packs. The polynomial routes
// follow the classic Cephes rational approximations so both instantiations
// round identically; accuracy against libm is checked to ~2 ulp in the
// kernel tests. Domains are the ones the kernels need:
//   kexp:      [-708.39, 709.78], flushes to 0 / inf outside
//   klog:      positive normal doubles (used on (0, 1))
//   kcossin2pi: u in [0, 1), returns cos(2*pi*u) and sin(2*pi*u)

#include "tiplab/kern/pack.hpp"

#include <cstddef>

namespace tiplab::kern {

template <class L, std::size_t N>
inline typename L::f polevl(typename L::f x, const double (&c)[N]) {
    auto r = L::set(c[0]);
    for (std::size_t k = 1; k < N; ++k) r = L::add(L::mul(r, x), L::set(c[k]));
    return r;
}

// monic variant: leading coefficient 1
template <class L, std::size_t N>
inline typename L::f p1evl(typename L::f x, const double (&c)[N]) {
    auto r = L::add(x, L::set(c[0]));
    for (std::size_t k = 1; k < N; ++k) r = L::add(L::mul(r, x), L::set(c[k]));
    return r;
}

namespace detail {

inline constexpr double kExpP[3] = {
    1.26177193074810590878e-4,
    3.02994407707441961300e-2,
    9.99999999999999999910e-1,
};
inline constexpr double kExpQ[4] = {
    3.00198505138664455042e-6,
    2.52448340349684104192e-3,
    2.27265548208155028766e-1,
    2.00000000000000000005e0,
};

inline constexpr double kLogP[6] = {
    1.01875663804580931796e-4,
    4.97494994976747001425e-1,
    4.70579119878881725854e0,
    1.44989225341610930846e1,
    1.79368678507819816313e1,
    7.70838733755885391666e0,
};
inline constexpr double kLogQ[5] = {
    1.12873587189167450590e1,
    4.52279145837532221105e1,
    8.29875266912776603211e1,
    7.11544750618563894466e1,
    2.31251620126765340583e1,
};

inline constexpr double kSinCof[6] = {
    1.58962301576546568060e-10,
    -2.50507477628578072866e-8,
    2.75573136213857245213e-6,
    -1.98412698295895385996e-4,
    8.33333333332211858878e-3,
    -1.66666666666666307295e-1,
};
inline constexpr double kCosCof[6] = {
    -1.13585365213876817300e-11,
    2.08757008419747316778e-9,
    -2.75573141792967388112e-7,
    2.48015872888517179954e-5,
    -1.38888888888730564116e-3,
    4.16666666666665929218e-2,
};

} // namespace detail

template <class L>
inline typename L::f kexp(typename L::f x0) {
    using f = typename L::f;
    const f log2e = L::set(1.4426950408889634073599);
    const f c1 = L::set(6.93145751953125e-1);
    const f c2 = L::set(1.42860682030941723212e-6);

    f n = L::floor(L::add(L::mul(log2e, x0), L::set(0.5)));
    f x = L::sub(x0, L::mul(n, c1));
    x = L::sub(x, L::mul(n, c2));

    f xx = L::mul(x, x);
    f px = L::mul(x, polevl<L>(xx, detail::kExpP));
    f qx = polevl<L>(xx, detail::kExpQ);
    f y = L::div(px, L::sub(qx, px));
    y = L::add(L::set(1.0), L::add(y, y));

    // 2^n via exponent bits; n clamped so the biased exponent stays valid,
    // out-of-range arguments are fixed up afterwards
    n = L::max(L::min(n, L::set(1024.0)), L::set(-1022.0));
    f biased = L::add(n, L::set(1023.0)); // in [1, 2047]
    typename L::i m = L::andi(L::icast(L::add(biased, L::set(6755399441055744.0))),
                              L::iset(0xFFFFFFFFull));
    f scale = L::fcast(L::slli(m, 52));
    y = L::mul(y, scale);

    y = L::select(L::cmplt(x0, L::set(-708.396418532264106)), L::set(0.0), y);
    y = L::select(L::cmpgt(x0, L::set(709.782712893383996)),
                  L::set(__builtin_inf()), y);
    return y;
}

template <class L>
inline typename L::f klog(typename L::f x0) {
    using f = typename L::f;
    typename L::i bits = L::icast(x0);
    f e = L::sub(L::u52_to_f(L::srli(bits, 52)), L::set(1022.0));
    f m = L::fcast(L::ori(L::andi(bits, L::iset(0x000FFFFFFFFFFFFFull)),
                          L::iset(0x3FE0000000000000ull)));

    f below = L::cmplt(m, L::set(0.70710678118654752440));
    e = L::sub(e, L::select(below, L::set(1.0), L::set(0.0)));
    f x = L::select(below, L::sub(L::add(m, m), L::set(1.0)),
                    L::sub(m, L::set(1.0)));

    f z = L::mul(x, x);
    f y = L::mul(x, L::div(L::mul(z, polevl<L>(x, detail::kLogP)),
                           p1evl<L>(x, detail::kLogQ)));
    y = L::sub(y, L::mul(e, L::set(2.121944400546905827679e-4)));
    y = L::sub(y, L::mul(L::set(0.5), z));
    f r = L::add(x, y);
    r = L::add(r, L::mul(e, L::set(0.693359375)));
    return r;
}

/// cos(2*pi*u) and sin(2*pi*u) for u in [0, 1). The octant reduction is
/// exact: q = 8u and q - j are both computed without rounding.
template <class L>
inline void kcossin2pi(typename L::f u, typename L::f* cos_out,
                       typename L::f* sin_out) {
    using f = typename L::f;
    const f pio4 = L::set(7.85398163397448309616e-1);

    f q = L::mul(u, L::set(8.0));
    f j = L::floor(q);
    f odd = L::sub(j, L::add(L::floor(L::mul(j, L::set(0.5))),
                             L::floor(L::mul(j, L::set(0.5)))));
    f y = L::add(j, odd); // even octant count in {0,2,4,6,8}
    f z = L::mul(L::sub(q, y), pio4);

    f w = L::mul(y, L::set(0.5)); // {0..4}
    f v = L::sub(w, L::mul(L::set(4.0), L::floor(L::mul(w, L::set(0.25)))));

    f zz = L::mul(z, z);
    f sinp = L::add(z, L::mul(L::mul(z, zz), polevl<L>(zz, detail::kSinCof)));
    f cosp = L::add(L::sub(L::set(1.0), L::mul(L::set(0.5), zz)),
                    L::mul(L::mul(zz, zz), polevl<L>(zz, detail::kCosCof)));

    f v1 = L::cmpeq(v, L::set(1.0));
    f v2 = L::cmpeq(v, L::set(2.0));
    f v3 = L::cmpeq(v, L::set(3.0));
    f one = L::set(1.0), mone = L::set(-1.0);

    // cos: v=0 -> +C, 1 -> -S, 2 -> -C, 3 -> +S
    f cval = L::select(L::orf(v1, v3), sinp, cosp);
    f csign = L::select(L::orf(v1, v2), mone, one);
    *cos_out = L::mul(cval, csign);

    // sin: v=0 -> +S, 1 -> +C, 2 -> -S, 3 -> -C
    f sval = L::select(L::orf(v1, v3), cosp, sinp);
    f ssign = L::select(L::orf(v2, v3), mone, one);
    *sin_out = L::mul(sval, ssign);
}

} // namespace tiplab::kern
