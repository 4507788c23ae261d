#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lpofdm/channel.hpp"
#include "lpofdm/coding.hpp"
#include "lpofdm/detectors.hpp"
#include "lpofdm/params.hpp"
#include "lpofdm/prediction.hpp"
#include "lpofdm/rng.hpp"
#include "lpofdm/supertrellis.hpp"

namespace lpofdm {

struct DetectorChoice {
    enum class Kind { coherent, predictive };
    Kind kind = Kind::coherent;
    int order = 0;  // prediction order, predictive only

    std::string id() const {
        return kind == Kind::coherent ? "coherent" : "p" + std::to_string(order);
    }

    static DetectorChoice parse(const std::string& name) {
        if (name == "coherent") return {Kind::coherent, 0};
        if (name.size() >= 2 && name[0] == 'p') {
            int order = std::stoi(name.substr(1));
            if (order >= 1 && order <= 8) return {Kind::predictive, order};
        }
        throw std::invalid_argument("unknown detector '" + name + "'");
    }
};

struct RunConfig {
    SystemParams params{};
    std::vector<double> snr_points_db = {0.0, 4.0, 8.0, 12.0, 17.0};
    std::vector<DetectorChoice> detectors = {
        {DetectorChoice::Kind::coherent, 0},
        {DetectorChoice::Kind::predictive, 1},
        {DetectorChoice::Kind::predictive, 2},
        {DetectorChoice::Kind::predictive, 3},
    };
    long frames_per_point = 10000;
    std::uint64_t master_seed = 42;
    int workers = 1;
    bool early_stop = false;
    std::string csv_path;
    std::string svg_path;
    bool overlay_reference = false;
    bool progress = false;

    void validate() const {
        params.validate();
        if (snr_points_db.empty()) throw std::invalid_argument("no SNR points configured");
        if (detectors.empty()) throw std::invalid_argument("no detectors configured");
        if (frames_per_point < 1) throw std::invalid_argument("frames_per_point must be >= 1");
        if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    }
};

/// Detector engines for one SNR point; immutable, shared by all workers.
struct DetectorBank {
    std::vector<DetectorChoice> choices;
    double sigma_w2 = 0.0;
    std::shared_ptr<const CoherentViterbi> coherent;
    std::vector<std::shared_ptr<const PredictiveViterbi>> predictive;  // parallel to choices

    const PredictiveViterbi& predictive_at(std::size_t i) const { return *predictive[i]; }
};

inline DetectorBank build_detector_bank(const SystemParams& params,
                                        const std::vector<DetectorChoice>& detectors,
                                        double snr_db,
                                        TransientMode mode = TransientMode::skip) {
    DetectorBank bank;
    bank.choices = detectors;
    bank.sigma_w2 = noise_variance_for_snr(snr_db, params);
    const EncoderTrellis enc = build_encoder_trellis(params.encoder);
    const AutocorrModel model = AutocorrModel::from(params, bank.sigma_w2);
    bank.predictive.resize(detectors.size());
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        if (detectors[i].kind == DetectorChoice::Kind::coherent) {
            if (!bank.coherent) bank.coherent = std::make_shared<CoherentViterbi>(enc, params);
        } else {
            const int p = detectors[i].order;
            bank.predictive[i] = std::make_shared<PredictiveViterbi>(
                build_reduced_supertrellis(enc, p), design_predictors(model, p), params, mode);
        }
    }
    return bank;
}

/// One Monte-Carlo frame: data, channel, received samples and every
/// configured detector's decisions.
struct FrameRecord {
    std::vector<int> tx_bits;
    ChannelRealization channel;
    ReceivedFrame frame;
    std::vector<DetectorOutput> outputs;  // parallel to bank.choices
};

/// Deterministic function of (master_seed, snr point, frame_index); the
/// draw order is fixed as data bits, channel taps, then noise.
inline FrameRecord simulate_frame(const RunConfig& cfg, const DetectorBank& bank, double snr_db,
                                  long frame_index) {
    const SystemParams& p = cfg.params;
    FrameRng rng(cfg.master_seed, snr_stream_key(snr_db), static_cast<std::uint64_t>(frame_index));

    FrameRecord rec;
    rec.tx_bits.resize(p.ld);
    for (int& b : rec.tx_bits) b = rng.bit();

    const EncoderTrellis enc = build_encoder_trellis(p.encoder);
    auto [dibits, end_state] = conv_encode(rec.tx_bits, enc, 0);
    (void)end_state;
    const std::vector<cplx> symbols = diff_encode(dibits, reference_symbol());

    rec.channel = draw_channel(rng, p);
    rec.frame = transmit_through(symbols, rec.channel, bank.sigma_w2, p, rng);

    rec.outputs.resize(bank.choices.size());
    for (std::size_t i = 0; i < bank.choices.size(); ++i) {
        DetectorOutput out = bank.choices[i].kind == DetectorChoice::Kind::coherent
                                 ? bank.coherent->decode(rec.frame, symbols)
                                 : bank.predictive_at(i).decode(rec.frame);
        out.bit_errors = 0;
        for (int k = 0; k < p.ld; ++k) out.bit_errors += (out.bits[k] != rec.tx_bits[k]);
        rec.outputs[i] = std::move(out);
    }
    return rec;
}

struct BerRecord {
    std::string detector;
    double snr_db = 0.0;
    long long bits = 0;
    long long errors = 0;
    double ber = 0.0;
    double seconds = 0.0;

    double std_error() const {
        if (bits <= 0) return 0.0;
        const double p = ber;
        return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(bits));
    }
};

/// Sweeps every (SNR, detector) pair. Frames are shared by all detectors at
/// a point and sharded over workers in fixed chunks, with integer error
/// reduction, so results do not depend on worker count or execution order.
/// With early_stop set, the sweep ends a point at a chunk boundary once at
/// least 10% of the frames are done and every detector has >= 500 errors.
inline std::vector<BerRecord> run_ber_sweep(const RunConfig& cfg) {
    cfg.validate();
    const int nd = static_cast<int>(cfg.detectors.size());
    std::vector<BerRecord> records;

    for (double snr_db : cfg.snr_points_db) {
        const DetectorBank bank = build_detector_bank(cfg.params, cfg.detectors, snr_db);
        std::vector<long long> errors(nd, 0);
        long frames_done = 0;
        const auto t0 = std::chrono::steady_clock::now();

        const long chunk = std::max<long>(1, (cfg.frames_per_point + 9) / 10);
        for (long start = 0; start < cfg.frames_per_point; start += chunk) {
            const long stop = std::min(cfg.frames_per_point, start + chunk);
            const int nw = cfg.workers;
            std::vector<std::vector<long long>> partial(nw, std::vector<long long>(nd, 0));
            auto work = [&](int w) {
                const long span = stop - start;
                const long lo = start + span * w / nw;
                const long hi = start + span * (w + 1) / nw;
                for (long f = lo; f < hi; ++f) {
                    FrameRecord rec = simulate_frame(cfg, bank, snr_db, f);
                    for (int d = 0; d < nd; ++d) partial[w][d] += rec.outputs[d].bit_errors;
                }
            };
            if (nw == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                pool.reserve(nw);
                for (int w = 0; w < nw; ++w) pool.emplace_back(work, w);
                for (auto& th : pool) th.join();
            }
            for (int w = 0; w < nw; ++w)
                for (int d = 0; d < nd; ++d) errors[d] += partial[w][d];
            frames_done = stop;

            if (cfg.early_stop && frames_done * 10 >= cfg.frames_per_point) {
                bool all_confident = true;
                for (int d = 0; d < nd; ++d) all_confident &= errors[d] >= 500;
                if (all_confident) break;
            }
        }

        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (int d = 0; d < nd; ++d) {
            BerRecord r;
            r.detector = cfg.detectors[d].id();
            r.snr_db = snr_db;
            r.bits = static_cast<long long>(frames_done) * cfg.params.ld;
            r.errors = errors[d];
            r.ber = r.bits > 0 ? static_cast<double>(r.errors) / static_cast<double>(r.bits) : 0.0;
            r.seconds = seconds;
            records.push_back(std::move(r));
        }
        if (cfg.progress) {
            std::fprintf(stderr, "snr %.1f dB: %ld frames in %.1fs\n", snr_db, frames_done, seconds);
        }
    }
    return records;
}

}  // namespace lpofdm
