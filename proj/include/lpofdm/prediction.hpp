#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lpofdm/params.hpp"

namespace lpofdm {

/// Closed-form second-order statistics of the per-subcarrier observation
/// X_k = Y_k / S_k. Everything downstream of the receiver's "perfect
/// knowledge of the channel and noise statistics" lives here.
struct AutocorrModel {
    double sigma_f2 = 0.5;
    int lh = 10;
    int ld = 1024;
    double sigma_w2 = 0.0;
    double symbol_energy = 1.0;

    static AutocorrModel from(const SystemParams& p, double sigma_w2) {
        return {p.sigma_f2, p.lh, p.ld, sigma_w2, p.symbol_energy()};
    }
};

/// (1/2) E[H_k H*_{k-m}] = sigma_f^2 sum_{n=0}^{lh-1} e^{-j2pi nm/ld}.
inline cplx r_hh(long m, const AutocorrModel& model) {
    cplx acc = 0.0;
    for (int n = 0; n < model.lh; ++n) {
        double ang = -2.0 * std::numbers::pi * static_cast<double>(n) * static_cast<double>(m) /
                     static_cast<double>(model.ld);
        acc += cplx(std::cos(ang), std::sin(ang));
    }
    return model.sigma_f2 * acc;
}

/// (1/2) E[X_k X*_{k-m}] = r_hh(m) + sigma_w^2 ld / |S|^2 at lag 0.
inline cplx r_xx(long m, const AutocorrModel& model) {
    cplx r = r_hh(m, model);
    if (m == 0) r += model.sigma_w2 * model.ld / model.symbol_energy;
    return r;
}

/// Optimal linear predictors of X_k from its past, for every order
/// p = 0..P. coeffs[p] = {1, a_{p,1}, ..., a_{p,p}} minimizes
/// (1/2)E|sum_j a_{p,j} X_{k-j}|^2; err_var[p] is that minimum.
struct PredictorSet {
    int order = 0;
    std::vector<std::vector<cplx>> coeffs;  // coeffs[p][j], j = 0..p, coeffs[p][0] = 1
    std::vector<double> err_var;            // sigma^2_{e,p}, p = 0..P
};

/// Order-recursive (Levinson) solve of the Hermitian Toeplitz normal
/// equations. Needed because the transient metric uses every order up to P.
inline PredictorSet design_predictors(const AutocorrModel& model, int order) {
    if (order < 0) throw std::invalid_argument("design_predictors: order must be >= 0");
    const double r0 = r_xx(0, model).real();
    if (!(r0 > 0.0)) throw std::invalid_argument("design_predictors: autocovariance not positive");

    std::vector<cplx> r(order + 1);
    for (int m = 0; m <= order; ++m) r[m] = r_xx(m, model);

    PredictorSet set;
    set.order = order;
    set.coeffs.assign(order + 1, {});
    set.err_var.assign(order + 1, 0.0);
    set.coeffs[0] = {cplx(1.0, 0.0)};
    set.err_var[0] = r0;

    std::vector<cplx> a = {cplx(1.0, 0.0)};
    double err = r0;
    for (int p = 1; p <= order; ++p) {
        cplx num = 0.0;
        for (int j = 0; j < p; ++j) num += a[j] * r[p - j];
        const cplx k = -num / err;
        std::vector<cplx> next(p + 1);
        next[0] = 1.0;
        for (int j = 1; j < p; ++j) next[j] = a[j] + k * std::conj(a[p - j]);
        next[p] = k;
        err *= 1.0 - std::norm(k);
        if (!(err > r0 * 1e-12))
            throw std::runtime_error("design_predictors: normal equations ill-conditioned");
        a = std::move(next);
        set.coeffs[p] = a;
        set.err_var[p] = err;
    }
    return set;
}

/// z_k = sum_{j=0}^{P} a_{P,j} window[j], window[j] = X_{k-j}.
inline cplx prediction_error(const std::vector<cplx>& window, const std::vector<cplx>& coeffs) {
    if (window.size() != coeffs.size())
        throw std::invalid_argument("prediction_error: window/coefficient length mismatch");
    cplx acc = 0.0;
    for (std::size_t j = 0; j < window.size(); ++j) acc += coeffs[j] * window[j];
    return acc;
}

/// Cholesky-equivalent factorization of the inverse autocovariance:
/// B^H D^{-1} B = Phi^{-1}, with B built row-by-row from the predictor
/// ladder and D from the error variances. Small dimensions only; this backs
/// the exhaustive decoder and the factorization identity checks.
struct WhiteningFactors {
    int dim = 0;
    std::vector<std::vector<cplx>> B;  // lower unitriangular, B[k][t] = a_{k,k-t}
    std::vector<double> D;             // sigma^2_{e,0..dim-1}
};

inline WhiteningFactors whitening_factors(const AutocorrModel& model, int dim) {
    if (dim < 1 || dim > 16) throw std::invalid_argument("whitening_factors: dim out of range");
    PredictorSet ladder;
    try {
        ladder = design_predictors(model, dim - 1);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("whitening_factors: autocovariance not positive definite");
    }
    WhiteningFactors w;
    w.dim = dim;
    w.D = ladder.err_var;
    w.B.assign(dim, std::vector<cplx>(dim, cplx(0.0, 0.0)));
    for (int k = 0; k < dim; ++k)
        for (int t = 0; t <= k; ++t) w.B[k][t] = ladder.coeffs[k][k - t];
    return w;
}

}  // namespace lpofdm
