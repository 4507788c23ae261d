#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lpofdm/channel.hpp"
#include "lpofdm/coding.hpp"
#include "lpofdm/prediction.hpp"
#include "lpofdm/supertrellis.hpp"

namespace lpofdm {

struct DetectorOutput {
    std::vector<int> bits;
    long bit_errors = -1;  // filled by the harness against the tx reference
};

/// Branch metric of the reduced-supertrellis receiver:
/// v = sum_l | sum_{j=0}^{P} a_{P,j} Y[l][j] e^{j Phi_j} |^2
/// with Y[l][j] the received sample j steps back.
inline double predictive_branch_metric(const std::vector<std::vector<cplx>>& y_window,
                                       const std::vector<cplx>& coeffs,
                                       const std::vector<cplx>& phase_ratios) {
    if (phase_ratios.size() < coeffs.size())
        throw std::invalid_argument("predictive_branch_metric: ratio vector too short");
    double v = 0.0;
    for (const auto& arm : y_window) {
        if (arm.size() < coeffs.size())
            throw std::invalid_argument("predictive_branch_metric: window shorter than order+1");
        cplx acc = 0.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j) acc += coeffs[j] * phase_ratios[j] * arm[j];
        v += std::norm(acc);
    }
    return v;
}

/// How the first P steps (whose observation window hangs over the frame
/// start) are scored. `skip` advances survivors with zero branch metric and
/// starts accumulation at k = P; `weighted` scores step k < P with the
/// order-k predictor and weights every term by 1/(2 sigma^2_{e,min(k,P)}),
/// which makes the path metric equal the exhaustive sequence metric.
enum class TransientMode { skip, weighted };

namespace detail {

constexpr double kUnreachable = 1e18;

/// Add-compare-select lattice with per-step release at a fixed decode
/// delay. Branch metrics come from a functor so the predictive and coherent
/// receivers share the survivor logic. Ties select the lower predecessor
/// state / lower state index.
class ViterbiLattice {
  public:
    struct Arc {
        std::uint16_t from = 0;
        std::uint16_t branch = 0;
        std::uint8_t bit = 0;
    };

    ViterbiLattice(int num_states, std::vector<std::array<Arc, 2>> incoming)
        : num_states_(num_states), incoming_(std::move(incoming)) {
        for (auto& arcs : incoming_)
            if (arcs[1].from < arcs[0].from) std::swap(arcs[0], arcs[1]);
    }

    int num_states() const { return num_states_; }

    /// Runs `horizon` steps. metric(k, branch_id) is invoked once per branch
    /// per step. anchor < 0 starts every state at metric zero; otherwise
    /// only `anchor` starts reachable. observe, when set, sees the path
    /// metrics after each step.
    template <class MetricFn>
    std::vector<int> decode(int horizon, int delay, int anchor, MetricFn&& metric,
                            const std::function<void(int, const std::vector<double>&)>& observe =
                                {}) const {
        std::vector<double> mu(num_states_, anchor < 0 ? 0.0 : kUnreachable);
        if (anchor >= 0) mu[anchor] = 0.0;
        std::vector<double> next(num_states_, 0.0);
        std::vector<std::uint8_t> choice(static_cast<std::size_t>(horizon) * num_states_);
        std::vector<int> bits(horizon, 0);

        for (int k = 0; k < horizon; ++k) {
            std::uint8_t* ch = &choice[static_cast<std::size_t>(k) * num_states_];
            for (int n = 0; n < num_states_; ++n) {
                const auto& arcs = incoming_[n];
                const double m0 = mu[arcs[0].from] + metric(k, arcs[0].branch);
                const double m1 = mu[arcs[1].from] + metric(k, arcs[1].branch);
                if (m1 < m0) {
                    next[n] = m1;
                    ch[n] = 1;
                } else {
                    next[n] = m0;
                    ch[n] = 0;
                }
            }
            mu.swap(next);
            if ((k + 1) % 1024 == 0) {
                const double lo = *std::min_element(mu.begin(), mu.end());
                for (double& v : mu) v -= lo;
            }
            if (observe) observe(k, mu);
            if (k >= delay) {
                int s = best_state(mu);
                for (int t = k; t > k - delay; --t) s = step_back(choice, t, s).first;
                bits[k - delay] = step_back(choice, k - delay, s).second;
            }
        }

        int s = best_state(mu);
        for (int t = horizon - 1; t >= std::max(0, horizon - delay); --t) {
            auto [prev, bit] = step_back(choice, t, s);
            bits[t] = bit;
            s = prev;
        }
        return bits;
    }

  private:
    int best_state(const std::vector<double>& mu) const {
        int best = 0;
        for (int n = 1; n < num_states_; ++n)
            if (mu[n] < mu[best]) best = n;
        return best;
    }

    std::pair<int, int> step_back(const std::vector<std::uint8_t>& choice, int t, int s) const {
        const auto& arc = incoming_[s][choice[static_cast<std::size_t>(t) * num_states_ + s]];
        return {arc.from, arc.bit};
    }

    int num_states_;
    std::vector<std::array<Arc, 2>> incoming_;
};

}  // namespace detail

/// Predictive Viterbi decoder on the isometry-reduced supertrellis. The
/// object is immutable after construction and safe to share across workers.
class PredictiveViterbi {
  public:
    PredictiveViterbi(ReducedSupertrellis trellis, PredictorSet predictors, SystemParams params,
                      TransientMode mode = TransientMode::skip)
        : st_(std::move(trellis)),
          pred_(std::move(predictors)),
          params_(std::move(params)),
          mode_(mode),
          lattice_(st_.num_states, make_incoming(st_)) {
        if (pred_.order != st_.order)
            throw std::invalid_argument("predictive_va: predictor order != supertrellis order");
        const int p = st_.order;
        const int nb = static_cast<int>(st_.branches.size());
        steady_.assign(static_cast<std::size_t>(nb) * (p + 1), cplx(0.0, 0.0));
        for (int b = 0; b < nb; ++b)
            for (int j = 0; j <= p; ++j)
                steady_[static_cast<std::size_t>(b) * (p + 1) + j] =
                    pred_.coeffs[p][j] * st_.branches[b].ratios[j];
        if (mode_ == TransientMode::weighted) {
            transient_.resize(p);
            for (int k = 0; k < p; ++k) {
                transient_[k].assign(static_cast<std::size_t>(nb) * (k + 1), cplx(0.0, 0.0));
                for (int b = 0; b < nb; ++b)
                    for (int j = 0; j <= k; ++j)
                        transient_[k][static_cast<std::size_t>(b) * (k + 1) + j] =
                            pred_.coeffs[k][j] * st_.branches[b].ratios[j];
            }
        }
    }

    int order() const { return st_.order; }
    const ReducedSupertrellis& trellis() const { return st_; }

    DetectorOutput decode(const ReceivedFrame& frame, int decode_delay = -1,
                          const std::function<void(int, const std::vector<double>&)>& observe =
                              {}) const {
        const int ld = frame.num_subcarriers();
        const int nr = frame.num_arms();
        const int p = st_.order;
        const int delay = decode_delay > 0 ? decode_delay : params_.decode_delay;

        auto metric = [&](int k, int branch) -> double {
            if (k < p) {
                if (mode_ == TransientMode::skip) return 0.0;
                const cplx* c = &transient_[k][static_cast<std::size_t>(branch) * (k + 1)];
                double v = 0.0;
                for (int l = 0; l < nr; ++l) {
                    const cplx* y = frame.Y[l].data() + k;
                    cplx acc = 0.0;
                    for (int j = 0; j <= k; ++j) acc += c[j] * y[-j];
                    v += std::norm(acc);
                }
                return v / (2.0 * pred_.err_var[k]);
            }
            const cplx* c = &steady_[static_cast<std::size_t>(branch) * (p + 1)];
            double v = 0.0;
            for (int l = 0; l < nr; ++l) {
                const cplx* y = frame.Y[l].data() + k;
                cplx acc = 0.0;
                for (int j = 0; j <= p; ++j) acc += c[j] * y[-j];
                v += std::norm(acc);
            }
            return mode_ == TransientMode::weighted ? v / (2.0 * pred_.err_var[p]) : v;
        };

        DetectorOutput out;
        out.bits = lattice_.decode(ld, std::min(delay, ld), anchor_state(), metric, observe);
        return out;
    }

  private:
    static std::vector<std::array<detail::ViterbiLattice::Arc, 2>> make_incoming(
        const ReducedSupertrellis& st) {
        std::vector<std::array<detail::ViterbiLattice::Arc, 2>> incoming(st.num_states);
        std::vector<int> fill(st.num_states, 0);
        for (std::size_t b = 0; b < st.branches.size(); ++b) {
            const auto& br = st.branches[b];
            incoming[br.to][fill[br.to]++] = {static_cast<std::uint16_t>(br.from),
                                              static_cast<std::uint16_t>(b),
                                              static_cast<std::uint8_t>(br.input)};
        }
        return incoming;
    }

    /// Encoder at state 0 with an all-zero virtual input history.
    int anchor_state() const { return 0; }

    ReducedSupertrellis st_;
    PredictorSet pred_;
    SystemParams params_;
    TransientMode mode_;
    std::vector<cplx> steady_;
    std::vector<std::vector<cplx>> transient_;
    detail::ViterbiLattice lattice_;
};

/// Ideal-coherent baseline: Viterbi detection over the encoder trellis with
/// the true channel DFT and an exact phase reference for every symbol (the
/// previous transmitted symbol is supplied to the receiver, so the
/// differential layer costs nothing). Branch metric
/// sum_l |Y[l][k] - H[l][k] S_{k-1} e^{j theta(d)}|^2. This upper-bounds any
/// realizable coherent receiver of the chain and is statistically the
/// coherent coded QPSK system without differential encoding.
class CoherentViterbi {
  public:
    CoherentViterbi(EncoderTrellis enc, SystemParams params)
        : enc_(std::move(enc)), params_(std::move(params)), lattice_(make_lattice(enc_)) {
        rotations_.resize(static_cast<std::size_t>(enc_.num_states) * 2);
        for (int e = 0; e < enc_.num_states; ++e)
            for (int u = 0; u < 2; ++u)
                rotations_[e * 2 + u] = unit_quarter(quarter_turns(enc_.out_dibit[e][u]));
    }

    /// tx_symbols supplies the genie phase references S_0..S_{ld-1};
    /// S_{-1} is the shared DQPSK reference.
    DetectorOutput decode(const ReceivedFrame& frame, const std::vector<cplx>& tx_symbols,
                          int decode_delay = -1) const {
        const int ld = frame.num_subcarriers();
        const int nr = frame.num_arms();
        if (static_cast<int>(tx_symbols.size()) != ld)
            throw std::invalid_argument("coherent_va: reference symbol count mismatch");
        const int delay = decode_delay > 0 ? decode_delay : params_.decode_delay;

        auto metric = [&](int k, int branch) -> double {
            const cplx s = (k == 0 ? reference_symbol() : tx_symbols[k - 1]) * rotations_[branch];
            double v = 0.0;
            for (int l = 0; l < nr; ++l) v += std::norm(frame.Y[l][k] - frame.H[l][k] * s);
            return v;
        };

        DetectorOutput out;
        out.bits = lattice_.decode(ld, std::min(delay, ld), /*anchor=*/0, metric);
        return out;
    }

  private:
    static detail::ViterbiLattice make_lattice(const EncoderTrellis& enc) {
        std::vector<std::array<detail::ViterbiLattice::Arc, 2>> incoming(enc.num_states);
        std::vector<int> fill(enc.num_states, 0);
        for (int e = 0; e < enc.num_states; ++e)
            for (int u = 0; u < 2; ++u) {
                const int to = enc.next_state[e][u];
                incoming[to][fill[to]++] = {static_cast<std::uint16_t>(e),
                                            static_cast<std::uint16_t>(e * 2 + u),
                                            static_cast<std::uint8_t>(u)};
            }
        return detail::ViterbiLattice(enc.num_states, std::move(incoming));
    }

    EncoderTrellis enc_;
    SystemParams params_;
    std::vector<cplx> rotations_;  // e^{j theta(d)} per (state, input)
    detail::ViterbiLattice lattice_;
};

/// Brute-force predictive ML over an explicit candidate list (data bit
/// sequences). Exponential in the frame length; small instances only. The
/// metric is the whitened sequence metric with the order-k predictor in the
/// transient and the order-P predictor from k = P on.
struct ExhaustiveResult {
    std::size_t best_index = 0;
    std::vector<int> bits;
    std::vector<double> metrics;
};

inline double exhaustive_sequence_metric(const ReceivedFrame& frame,
                                         const std::vector<int>& data_bits,
                                         const WhiteningFactors& w, int pred_order,
                                         const EncoderTrellis& enc) {
    const int ld = frame.num_subcarriers();
    if (w.dim < pred_order + 1)
        throw std::invalid_argument("exhaustive metric: whitening factors shallower than order");
    auto [dibits, final_state] = conv_encode(data_bits, enc, 0);
    (void)final_state;
    const std::vector<cplx> symbols = diff_encode(dibits, reference_symbol());

    double total = 0.0;
    for (int l = 0; l < frame.num_arms(); ++l) {
        for (int k = 0; k < ld; ++k) {
            const int p = std::min(k, pred_order);
            const auto& row = w.B[p];
            cplx z = 0.0;
            for (int j = 0; j <= p; ++j)
                z += row[p - j] * frame.Y[l][k - j] * std::conj(symbols[k - j]);
            total += std::norm(z) / (2.0 * w.D[p]);
        }
    }
    return total;
}

inline ExhaustiveResult exhaustive_predictive_ml(const ReceivedFrame& frame,
                                                 const std::vector<std::vector<int>>& candidates,
                                                 const WhiteningFactors& w, int pred_order,
                                                 const EncoderTrellis& enc) {
    const int ld = frame.num_subcarriers();
    if (ld > 12) throw std::invalid_argument("exhaustive_predictive_ml: frame too long");
    if (candidates.empty()) throw std::invalid_argument("exhaustive_predictive_ml: no candidates");

    ExhaustiveResult res;
    res.metrics.reserve(candidates.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < candidates.size(); ++q) {
        if (static_cast<int>(candidates[q].size()) != ld)
            throw std::invalid_argument("exhaustive_predictive_ml: candidate length mismatch");
        const double m = exhaustive_sequence_metric(frame, candidates[q], w, pred_order, enc);
        res.metrics.push_back(m);
        if (m < best) {
            best = m;
            res.best_index = q;
        }
    }
    res.bits = candidates[res.best_index];
    return res;
}

/// All 2^len data bit sequences, in index order (bit t of the index is
/// data bit t).
inline std::vector<std::vector<int>> all_data_sequences(int len) {
    if (len < 0 || len > 12) throw std::invalid_argument("all_data_sequences: length out of range");
    std::vector<std::vector<int>> out;
    out.reserve(1u << len);
    for (unsigned q = 0; q < (1u << len); ++q) {
        std::vector<int> bits(len);
        for (int t = 0; t < len; ++t) bits[t] = static_cast<int>((q >> t) & 1u);
        out.push_back(std::move(bits));
    }
    return out;
}

}  // namespace lpofdm
