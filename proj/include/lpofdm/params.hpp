#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace lpofdm {

using cplx = std::complex<double>;

/// Generator polynomials of the rate-1/2 recursive systematic encoder.
/// Bit i of a mask is the coefficient of D^i.
struct EncoderSpec {
    int rate_num = 1;
    int rate_den = 2;
    unsigned feedforward_poly = 0b101;  // 1 + D^2
    unsigned feedback_poly = 0b111;     // 1 + D + D^2
    int memory = 2;

    int num_states() const { return 1 << memory; }

    void validate() const {
        if (rate_num != 1 || rate_den != 2)
            throw std::invalid_argument("encoder: only rate 1/2 supported");
        if (memory < 1 || memory > 16)
            throw std::invalid_argument("encoder: memory out of range");
        if (feedforward_poly == 0 || feedback_poly == 0)
            throw std::invalid_argument("encoder: zero generator polynomial");
        if ((feedback_poly & 1u) == 0)
            throw std::invalid_argument("encoder: feedback polynomial needs nonzero constant term");
    }
};

/// All scalar simulation parameters. Defaults follow the baseline
/// configuration: 1024 subcarriers, 10-tap uniform-profile Rayleigh channel,
/// 4 receive antennas, unit-energy QPSK.
struct SystemParams {
    int ld = 1024;           // subcarriers / data bits per frame
    int lh = 10;             // channel taps
    int lcp = 9;             // cyclic prefix length, lh - 1
    int nr = 4;              // receive antennas
    double sigma_f2 = 0.5;   // 1-D fade variance per tap
    double sigma_w2 = 0.0;   // 1-D time-domain noise variance per sample
    int pred_order = 3;      // prediction order P
    int decode_delay = 30;   // Viterbi release delay D'_v
    EncoderSpec encoder{};

    int lf() const { return ld + lcp; }            // time-domain frame length
    double symbol_energy() const { return 1.0; }   // |S_k|^2

    void validate() const {
        if (ld < 2 || (ld & (ld - 1)) != 0)
            throw std::invalid_argument("ld must be a power of two");
        if (lh < 1) throw std::invalid_argument("lh must be positive");
        if (lcp < lh - 1)
            throw std::invalid_argument("cyclic prefix shorter than channel memory");
        if (nr < 1) throw std::invalid_argument("nr must be positive");
        if (sigma_f2 < 0.0 || sigma_w2 < 0.0)
            throw std::invalid_argument("variances must be non-negative");
        if (decode_delay < 1) throw std::invalid_argument("decode_delay must be positive");
        encoder.validate();
    }
};

}  // namespace lpofdm
