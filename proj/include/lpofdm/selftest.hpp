#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "lpofdm/harness.hpp"
#include "lpofdm/io.hpp"

namespace lpofdm {

namespace detail {

/// Dense solve of a Hermitian system by Gaussian elimination with partial
/// pivoting; independent check of the order-recursive predictor design.
inline std::vector<cplx> dense_solve(std::vector<std::vector<cplx>> a, std::vector<cplx> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < n; ++r) {
            const cplx f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (int r = n - 1; r >= 0; --r) {
        cplx acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

/// Predictor coefficients a_{p,1..p} from the dense normal equations.
inline std::vector<cplx> dense_predictor(const AutocorrModel& model, int p) {
    std::vector<std::vector<cplx>> phi(p, std::vector<cplx>(p));
    std::vector<cplx> rhs(p);
    for (int i = 1; i <= p; ++i) {
        rhs[i - 1] = -r_xx(i, model);
        for (int j = 1; j <= p; ++j) phi[i - 1][j - 1] = r_xx(i - j, model);
    }
    return dense_solve(std::move(phi), std::move(rhs));
}

}  // namespace detail

/// Quick oracle battery behind the `selftest` CLI command. Prints one line
/// per check; returns true when everything passes.
inline bool run_selftest() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
        if (!ok) ++failures;
    };

    SystemParams params;  // defaults
    const EncoderTrellis enc = build_encoder_trellis(params.encoder);

    {
        static const int table[16][3] = {{0, 0, 0}, {0, 1, 5}, {1, 0, 0}, {1, 1, 5},
                                         {2, 0, 4}, {2, 1, 1}, {3, 0, 4}, {3, 1, 1},
                                         {4, 0, 6}, {4, 1, 3}, {5, 0, 6}, {5, 1, 3},
                                         {6, 0, 2}, {6, 1, 7}, {7, 0, 2}, {7, 1, 7}};
        const FullSupertrellis st = build_full_supertrellis(enc, 1);
        bool ok = st.num_states == 8;
        for (const auto& row : table)
            ok = ok && st.transitions[row[0]][row[1]].next == row[2];
        check("order-1 supertrellis transition table", ok);
    }
    {
        bool ok = true;
        for (int p = 1; p <= 3; ++p)
            ok = ok && build_reduced_supertrellis(enc, p).num_states == (4 << (p - 1));
        check("reduced supertrellis state counts 4/8/16", ok);
    }
    {
        FrameRng rng(7, 7, 7);
        std::vector<cplx> x(256);
        for (auto& v : x) v = {rng.normal(), rng.normal()};
        const auto y = dft(dft(x, x.size(), DftDirection::forward), x.size(), DftDirection::inverse);
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
        check("dft inverse(forward) identity", worst < 1e-10);
    }
    {
        FrameRng rng(3, 1, 4);
        std::vector<int> dibits(512);
        for (auto& d : dibits) d = static_cast<int>(rng.raw() & 3);
        const auto symbols = diff_encode(dibits, reference_symbol());
        check("differential encode/decode round trip",
              diff_decode_dibits(symbols, reference_symbol()) == dibits);
    }
    {
        const AutocorrModel model = AutocorrModel::from(params, noise_variance_for_snr(8.0, params));
        const PredictorSet set = design_predictors(model, 3);
        const auto dense = detail::dense_predictor(model, 3);
        double worst = 0.0;
        for (int j = 1; j <= 3; ++j) worst = std::max(worst, std::abs(set.coeffs[3][j] - dense[j - 1]));
        check("levinson ladder vs dense solve (P=3, 8 dB)", worst < 1e-9);
    }
    {
        const AutocorrModel model = AutocorrModel::from(params, noise_variance_for_snr(8.0, params));
        const WhiteningFactors w = whitening_factors(model, 8);
        // residual of B^H D^-1 B * Phi - I
        double worst = 0.0;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                cplx acc = 0.0;
                for (int a = 0; a < 8; ++a) {
                    cplx binv = 0.0;
                    for (int b = 0; b < 8; ++b)
                        binv += std::conj(w.B[b][i]) / w.D[b] * w.B[b][a];
                    acc += binv * r_xx(a - j, model);
                }
                worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
            }
        check("whitening factorization identity (L=8)", worst < 1e-8);
    }
    {
        SystemParams small = params;
        small.ld = 64;
        RunConfig cfg;
        cfg.params = small;
        cfg.snr_points_db = {300.0};  // effectively noiseless
        cfg.frames_per_point = 20;
        const DetectorBank bank = build_detector_bank(small, cfg.detectors, 300.0);
        long long errs = 0;
        for (long f = 0; f < cfg.frames_per_point; ++f) {
            const FrameRecord rec = simulate_frame(cfg, bank, 300.0, f);
            for (const auto& out : rec.outputs) errs += out.bit_errors;
        }
        check("noiseless frames decode error-free (all detectors)", errs == 0);
    }

    std::printf("%s\n", failures == 0 ? "selftest: all checks passed"
                                      : "selftest: FAILURES detected");
    return failures == 0;
}

}  // namespace lpofdm
