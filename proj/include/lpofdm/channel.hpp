#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lpofdm/dft.hpp"
#include "lpofdm/params.hpp"
#include "lpofdm/rng.hpp"

namespace lpofdm {

/// One quasi-static channel draw: taps[l][i] for antenna l, delay i.
struct ChannelRealization {
    std::vector<std::vector<cplx>> taps;  // nr x lh

    int num_arms() const { return static_cast<int>(taps.size()); }
    int num_taps() const { return taps.empty() ? 0 : static_cast<int>(taps[0].size()); }
};

/// DFT-domain samples of one frame. Y[l][k] is the FFT output at arm l,
/// subcarrier k; H[l][k] the true channel DFT, kept for the coherent
/// baseline and diagnostics.
struct ReceivedFrame {
    std::vector<std::vector<cplx>> Y;
    std::vector<std::vector<cplx>> H;

    int num_arms() const { return static_cast<int>(Y.size()); }
    int num_subcarriers() const { return Y.empty() ? 0 : static_cast<int>(Y[0].size()); }
};

/// I.i.d. circularly-symmetric Gaussian taps, per-dimension variance
/// sigma_f^2 (uniform power delay profile).
inline ChannelRealization draw_channel(FrameRng& rng, const SystemParams& p) {
    const double sf = std::sqrt(p.sigma_f2);
    ChannelRealization ch;
    ch.taps.assign(p.nr, std::vector<cplx>(p.lh));
    for (int l = 0; l < p.nr; ++l)
        for (int i = 0; i < p.lh; ++i) {
            double re = sf * rng.normal();
            double im = sf * rng.normal();
            ch.taps[l][i] = {re, im};
        }
    return ch;
}

/// H[l][k] = sum_i h[l][i] e^{-j2pi ik/ld}, computed as the DFT of the
/// zero-padded tap vector.
inline std::vector<std::vector<cplx>> channel_dft(const ChannelRealization& ch, int ld) {
    if (ch.num_taps() > ld) throw std::invalid_argument("channel_dft: more taps than subcarriers");
    std::vector<std::vector<cplx>> H(ch.num_arms());
    for (int l = 0; l < ch.num_arms(); ++l) {
        std::vector<cplx> padded(ld, cplx(0.0, 0.0));
        for (int i = 0; i < ch.num_taps(); ++i) padded[i] = ch.taps[l][i];
        dft_inplace(padded, DftDirection::forward);
        H[l] = std::move(padded);
    }
    return H;
}

/// Per-arm-per-bit SNR -> 1-D time-domain noise variance:
/// snr = nr * (lh * 2 sigma_f^2) * |S|^2 / (ld * 2 sigma_w^2).
inline double noise_variance_for_snr(double snr_db, const SystemParams& p) {
    const double snr_lin = std::pow(10.0, snr_db / 10.0);
    if (!(snr_lin > 0.0)) throw std::invalid_argument("snr must be finite");
    return p.nr * p.lh * p.sigma_f2 * p.symbol_energy() / (p.ld * snr_lin);
}

/// Full OFDM pipeline: IFFT, cyclic prefix, per-arm linear convolution with
/// the channel taps, AWGN of per-dimension variance sigma_w^2 on every
/// time-domain sample, CP removal and FFT. The result satisfies
/// Y[l][k] = H[l][k] S_k + W[l][k] with W of per-dimension variance
/// ld * sigma_w^2.
inline ReceivedFrame transmit_through(const std::vector<cplx>& symbols,
                                      const ChannelRealization& ch, double sigma_w2,
                                      const SystemParams& p, FrameRng& rng) {
    if (static_cast<int>(symbols.size()) != p.ld)
        throw std::invalid_argument("transmit_through: need ld symbols");
    if (ch.num_arms() != p.nr || ch.num_taps() != p.lh)
        throw std::invalid_argument("transmit_through: channel dimensions mismatch");

    std::vector<cplx> time = dft(symbols, symbols.size(), DftDirection::inverse);

    const int lf = p.lf();
    std::vector<cplx> tx(lf);
    for (int i = 0; i < p.lcp; ++i) tx[i] = time[p.ld - p.lcp + i];
    for (int i = 0; i < p.ld; ++i) tx[p.lcp + i] = time[i];

    const double sw = std::sqrt(sigma_w2);
    ReceivedFrame frame;
    frame.Y.assign(p.nr, {});
    for (int l = 0; l < p.nr; ++l) {
        // Linear convolution, tail beyond lf discarded.
        std::vector<cplx> rx(lf, cplx(0.0, 0.0));
        for (int n = 0; n < lf; ++n) {
            cplx acc = 0.0;
            const int imax = std::min(p.lh - 1, n);
            for (int i = 0; i <= imax; ++i) acc += ch.taps[l][i] * tx[n - i];
            rx[n] = acc;
        }
        for (int n = 0; n < lf; ++n) {
            double re = sw * rng.normal();
            double im = sw * rng.normal();
            rx[n] += cplx(re, im);
        }
        std::vector<cplx> body(rx.begin() + p.lcp, rx.end());
        dft_inplace(body, DftDirection::forward);
        frame.Y[l] = std::move(body);
    }
    frame.H = channel_dft(ch, p.ld);
    return frame;
}

}  // namespace lpofdm
