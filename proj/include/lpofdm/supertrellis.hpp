#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpofdm/coding.hpp"

namespace lpofdm {

/// Pre-isometry ("unnormalized") supertrellis: encoder state combined with
/// the contents of an order-P prediction filter. State index
/// j = i * N^P + m, where i is the encoder state and m the decimal of the
/// N-ary input-digit tuple (N = 2 for a rate-1/2 binary code). The filter
/// slots hold a valid encoded digit sequence generated by running the
/// encoder over the tuple, oldest input first.
struct FullSupertrellis {
    struct State {
        int encoder_state = 0;       // E_i, after consuming the whole tuple
        int encoder_start = 0;       // E_s, before the oldest tuple digit
        int filter_state = 0;        // m
        std::vector<int> inputs;     // N_1..N_P, newest first
        std::vector<int> digits;     // S_1..S_P, newest first
        std::vector<cplx> symbols;   // qpsk_map(S_t), newest first
    };
    struct Transition {
        int next = 0;
        int out_digit = 0;
    };

    int order = 0;
    int num_states = 0;
    std::vector<State> states;
    std::vector<std::array<Transition, 2>> transitions;  // [state][input]
};

inline FullSupertrellis build_full_supertrellis(const EncoderTrellis& enc, int order) {
    if (order < 1) throw std::invalid_argument("supertrellis: order must be >= 1");
    if (order > 20) throw std::invalid_argument("supertrellis: order too large");
    const int n_tuples = 1 << order;
    const int se = enc.num_states;

    FullSupertrellis st;
    st.order = order;
    st.num_states = se * n_tuples;
    st.states.assign(st.num_states, {});
    st.transitions.assign(st.num_states, {});
    std::vector<char> seen(st.num_states, 0);

    for (int s = 0; s < se; ++s) {
        for (int m = 0; m < n_tuples; ++m) {
            // Tuple digits N_1..N_P; N_P (the oldest input) is the least
            // significant digit of m.
            std::vector<int> inputs(order);
            for (int t = 1; t <= order; ++t) inputs[t - 1] = (m >> (order - t)) & 1;

            std::vector<int> digits(order);
            int e = s;
            for (int t = order; t >= 1; --t) {  // feed oldest first
                digits[t - 1] = enc.out_dibit[e][inputs[t - 1]];
                e = enc.next_state[e][inputs[t - 1]];
            }
            const int j = e * n_tuples + m;
            if (seen[j]) throw std::logic_error("supertrellis: duplicate state (encoder not backward-unique)");
            seen[j] = 1;

            auto& state = st.states[j];
            state.encoder_state = e;
            state.encoder_start = s;
            state.filter_state = m;
            state.inputs = inputs;
            state.digits = digits;
            state.symbols.reserve(order);
            for (int d : digits) state.symbols.push_back(qpsk_map(d));

            for (int u = 0; u < 2; ++u) {
                const int f = enc.next_state[e][u];
                const int l = (u << (order - 1)) | (m >> 1);
                st.transitions[j][u] = {f * n_tuples + l, enc.out_dibit[e][u]};
            }
        }
    }
    return st;
}

/// Transition table in the three-column layout (present state, input,
/// next state), one row per branch in ascending state/input order.
inline std::string format_supertrellis_table(const FullSupertrellis& st) {
    std::ostringstream out;
    for (int j = 0; j < st.num_states; ++j)
        for (int u = 0; u < 2; ++u)
            out << j << ' ' << u << ' ' << st.transitions[j][u].next << '\n';
    return out.str();
}

/// Isometry-reduced supertrellis. A state is the encoder state plus the
/// last P-1 input bits; the branch metric only needs the phase changes
/// between the branch symbol and each filter symbol, and those are fixed by
/// the branch digit d_0 plus the P-1 digits reconstructed by walking the
/// encoder backward through the stored input bits. State count is
/// S_E * 2^(P-1).
struct ReducedSupertrellis {
    struct Branch {
        int from = 0;
        int to = 0;
        int input = 0;
        int digit = 0;                 // d_0
        std::vector<int> quarters;     // Phi_j in quarter turns, j = 0..P
        std::vector<cplx> ratios;      // e^{j Phi_j} = S_0 / S_j, j = 0..P
    };

    int order = 1;
    int num_states = 0;
    std::vector<Branch> branches;               // id = 2*state + input
    std::vector<std::array<int, 2>> incoming;   // [state] -> branch ids converging on it
    EncoderTrellis encoder;

    const Branch& branch(int state, int input) const { return branches[2 * state + input]; }
};

inline ReducedSupertrellis build_reduced_supertrellis(const EncoderTrellis& enc, int order) {
    if (order < 1)
        throw std::invalid_argument("reduced supertrellis: order must be >= 1");
    if (order > 20) throw std::invalid_argument("reduced supertrellis: order too large");
    const int hist_bits = order - 1;
    const int n_hist = 1 << hist_bits;
    const int se = enc.num_states;

    ReducedSupertrellis st;
    st.order = order;
    st.num_states = se * n_hist;
    st.encoder = enc;
    st.branches.assign(2 * st.num_states, {});
    st.incoming.assign(st.num_states, {-1, -1});
    std::vector<int> fill(st.num_states, 0);

    for (int n = 0; n < st.num_states; ++n) {
        const int e = n >> hist_bits;
        const int hist = n & (n_hist - 1);  // newest history bit at MSB
        for (int u = 0; u < 2; ++u) {
            auto& b = st.branches[2 * n + u];
            b.from = n;
            b.input = u;
            b.digit = enc.out_dibit[e][u];

            const int next_e = enc.next_state[e][u];
            const int next_hist =
                hist_bits == 0 ? 0 : ((u << (hist_bits - 1)) | (hist >> 1)) & (n_hist - 1);
            b.to = (next_e << hist_bits) | next_hist;

            // Reconstruct digits d_1..d_{P-1} backward through the history.
            std::vector<int> digits(order);
            digits[0] = b.digit;
            int cur = e;
            for (int t = 1; t < order; ++t) {
                const int bit = (hist >> (hist_bits - t)) & 1;
                const int prev = enc.prev_state[cur][bit];
                digits[t] = enc.out_dibit[prev][bit];
                cur = prev;
            }

            b.quarters.assign(order + 1, 0);
            b.ratios.assign(order + 1, cplx(1.0, 0.0));
            int q = 0;
            for (int j = 1; j <= order; ++j) {
                q = (q + quarter_turns(digits[j - 1])) & 3;
                b.quarters[j] = q;
                b.ratios[j] = unit_quarter(q);
            }

            auto& in = st.incoming[b.to];
            if (fill[b.to] >= 2) throw std::logic_error("reduced supertrellis: in-degree exceeded");
            in[fill[b.to]++] = 2 * n + u;
        }
    }
    for (int n = 0; n < st.num_states; ++n)
        if (fill[n] != 2) throw std::logic_error("reduced supertrellis: state with in-degree != 2");
    return st;
}

/// [1, e^{j Phi_1}, ..., e^{j Phi_P}] for one branch.
inline const std::vector<cplx>& branch_phase_ratios(const ReducedSupertrellis::Branch& b) {
    return b.ratios;
}

}  // namespace lpofdm
