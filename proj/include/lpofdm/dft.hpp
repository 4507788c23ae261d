#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lpofdm/params.hpp"

namespace lpofdm {

enum class DftDirection { forward, inverse };

/// In-place iterative radix-2 transform. Forward applies no scale factor,
/// X_k = sum_i x_i e^{-j2pi ik/n}; inverse carries the 1/n factor so that
/// inverse(forward(x)) = x.
inline void dft_inplace(std::vector<cplx>& x, DftDirection dir) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("dft: size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    const double sign = (dir == DftDirection::forward) ? -1.0 : 1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = x[i + k];
                cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (dir == DftDirection::inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

inline std::vector<cplx> dft(const std::vector<cplx>& x, std::size_t size, DftDirection dir) {
    if (x.size() != size) throw std::invalid_argument("dft: length mismatch");
    std::vector<cplx> out = x;
    dft_inplace(out, dir);
    return out;
}

}  // namespace lpofdm
