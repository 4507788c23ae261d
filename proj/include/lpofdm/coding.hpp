#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lpofdm/params.hpp"

namespace lpofdm {

/// State-transition and output tables of the recursive systematic rate-1/2
/// encoder. State index is 2*s1 + s2 with s1 the newest register content
/// (generalized to memory > 2 with the newest bit in the top position).
/// A code digit ("dibit") is the decimal of (systematic, parity) with the
/// systematic bit as MSB.
struct EncoderTrellis {
    int num_states = 0;
    std::vector<std::array<int, 2>> next_state;  // [state][input]
    std::vector<std::array<int, 2>> out_dibit;   // [state][input]
    std::vector<std::array<int, 2>> prev_state;  // [next_state][input] -> unique predecessor
};

namespace detail {
inline int parity_of(unsigned v) { return __builtin_parity(v); }
}  // namespace detail

inline EncoderTrellis build_encoder_trellis(const EncoderSpec& spec) {
    spec.validate();
    const int nu = spec.memory;
    const int ns = 1 << nu;
    // Register taps act on the shift register only (bits D^1..D^nu); the
    // constant term of each polynomial acts on the feedback node.
    const unsigned fb_taps = (spec.feedback_poly >> 1) & ((1u << nu) - 1);
    const unsigned ff_taps = (spec.feedforward_poly >> 1) & ((1u << nu) - 1);
    const int ff_const = static_cast<int>(spec.feedforward_poly & 1u);

    EncoderTrellis t;
    t.num_states = ns;
    t.next_state.assign(ns, {0, 0});
    t.out_dibit.assign(ns, {0, 0});
    t.prev_state.assign(ns, {-1, -1});

    for (int s = 0; s < ns; ++s) {
        // Bit nu-1 of s is s1 (newest); bit 0 is the oldest register bit.
        // Polynomial tap i (for D^i) reads register bit nu-i.
        unsigned reg = 0;
        for (int i = 1; i <= nu; ++i) reg |= static_cast<unsigned>((s >> (nu - i)) & 1) << (i - 1);
        for (int u = 0; u < 2; ++u) {
            const int f = u ^ detail::parity_of(reg & fb_taps);
            const int par = (ff_const ? f : 0) ^ detail::parity_of(reg & ff_taps);
            const int next = (f << (nu - 1)) | (s >> 1);
            t.next_state[s][u] = next;
            t.out_dibit[s][u] = 2 * u + par;
        }
    }

    for (int s = 0; s < ns; ++s)
        for (int u = 0; u < 2; ++u) {
            int h = t.next_state[s][u];
            if (t.prev_state[h][u] != -1)
                throw std::logic_error("encoder trellis is not backward-unique");
            t.prev_state[h][u] = s;
        }
    for (int h = 0; h < ns; ++h)
        for (int u = 0; u < 2; ++u)
            if (t.prev_state[h][u] < 0)
                throw std::logic_error("encoder trellis is not backward-unique");
    return t;
}

/// Encode a bit sequence starting from `start_state`; one code digit per
/// input bit. The code is left unterminated.
inline std::pair<std::vector<int>, int> conv_encode(const std::vector<int>& bits,
                                                    const EncoderTrellis& trellis,
                                                    int start_state) {
    if (start_state < 0 || start_state >= trellis.num_states)
        throw std::invalid_argument("conv_encode: bad start state");
    std::vector<int> dibits;
    dibits.reserve(bits.size());
    int s = start_state;
    for (int b : bits) {
        dibits.push_back(trellis.out_dibit[s][b & 1]);
        s = trellis.next_state[s][b & 1];
    }
    return {std::move(dibits), s};
}

/// Differential rule: phase change per code digit, in quarter turns of pi/2.
/// Digits 0,1,2,3 advance by 0, pi/2, 3pi/2, pi.
inline int quarter_turns(int dibit) {
    static constexpr std::array<int, 4> q = {0, 1, 3, 2};
    return q[static_cast<unsigned>(dibit) & 3];
}

inline double phase_increment(int dibit) {
    return quarter_turns(dibit) * (std::numbers::pi / 2.0);
}

/// e^{j q pi/2} for integer quarter turns; exact values so rotations do not
/// accumulate rounding error.
inline cplx unit_quarter(int q) {
    static constexpr std::array<std::pair<double, double>, 4> tab = {
        {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}};
    const auto& [re, im] = tab[static_cast<unsigned>(q) & 3];
    return {re, im};
}

/// DQPSK: S_k = S_{k-1} e^{j theta(d_k)} with S_{-1} = reference. Rotations
/// are exact quarter-turn multiplies, so |S_k| = |reference| for every k.
inline std::vector<cplx> diff_encode(const std::vector<int>& dibits, cplx reference) {
    std::vector<cplx> out;
    out.reserve(dibits.size());
    cplx s = reference;
    for (int d : dibits) {
        s *= unit_quarter(quarter_turns(d));
        out.push_back(s);
    }
    return out;
}

/// Recover code digits from phase changes of consecutive symbols.
inline std::vector<int> diff_decode_dibits(const std::vector<cplx>& symbols, cplx reference) {
    static constexpr std::array<int, 4> inv_q = {0, 1, 3, 2};  // quarter turns -> digit
    std::vector<int> out;
    out.reserve(symbols.size());
    cplx prev = reference;
    for (const cplx& s : symbols) {
        double ang = std::arg(s * std::conj(prev));
        int q = static_cast<int>(std::lround(ang / (std::numbers::pi / 2.0))) & 3;
        out.push_back(inv_q[static_cast<unsigned>(q)]);
        prev = s;
    }
    return out;
}

/// Memoryless map used by the pre-isometry supertrellis, where the
/// differential encoder is absent: digit d -> e^{j d pi/2}.
inline cplx qpsk_map(int dibit) { return unit_quarter(static_cast<unsigned>(dibit) & 3); }

inline int qpsk_unmap(cplx symbol) {
    double ang = std::arg(symbol);
    return static_cast<int>(std::lround(ang / (std::numbers::pi / 2.0))) & 3;
}

/// Unit-energy DQPSK reference symbol, known to the transmitter and to the
/// coherent baseline only.
inline cplx reference_symbol() {
    return {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
}

}  // namespace lpofdm
