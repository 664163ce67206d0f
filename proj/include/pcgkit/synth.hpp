#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pcgkit/audio.hpp"
#include "pcgkit/common.hpp"
#include "pcgkit/fir.hpp"
#include "pcgkit/rng.hpp"

#include "json.hpp"

namespace pcgkit {

struct SynthConfig {
    double bpm = 60.0;
    double duration_s = 10.0;
    int sample_rate_hz = 4000;
    bool murmur = false;
    bool extrasystole = false;
    double noise_rms = 0.0;
    std::uint64_t seed = 0;
};

struct SynthEvent {
    std::string kind;  // "s1", "s2", "extra"
    double time_s = 0.0;
};

/// Generator output: the audible sample, the noise-free reference, and the
/// ground-truth event times. The reference and the log give feature tests an
/// exact oracle.
struct SynthResult {
    AudioSample audio;
    Signal clean;
    std::vector<SynthEvent> events;
};

namespace detail {

// Gaussian-windowed tone burst centred at `center_s`.
inline void add_burst(Signal& x, int fs, double center_s, double dur_s, double freq_hz,
                      double amp) {
    const double sigma = dur_s / 6.0;
    const int lo = std::max(0, static_cast<int>(std::floor((center_s - dur_s) * fs)));
    const int hi = std::min(static_cast<int>(x.size()) - 1,
                            static_cast<int>(std::ceil((center_s + dur_s) * fs)));
    for (int i = lo; i <= hi; ++i) {
        const double t = static_cast<double>(i) / fs - center_s;
        x[i] += amp * std::exp(-t * t / (2.0 * sigma * sigma)) *
                std::sin(2.0 * 3.14159265358979323846 * freq_hz * t);
    }
}

}  // namespace detail

/// Deterministic synthetic phonocardiogram. Per cycle: an S1 burst (~40 ms at
/// 100 Hz) and an S2 burst (~30 ms at 150 Hz) with the S1->S2 gap at 0.3 of the
/// cycle. Optional systolic murmur (120-400 Hz band noise at >= 3x noise_rms),
/// optional extrasystole (one S1-like burst mid-diastole of one random cycle),
/// plus additive white noise at noise_rms. Separate RNG streams per component,
/// so toggling the murmur leaves the rest of the waveform untouched.
inline SynthResult synth_pcg(const SynthConfig& cfg) {
    if (!(cfg.bpm > 0.0)) throw Error("synth_pcg: bpm must be positive");
    if (!(cfg.duration_s > 0.0)) throw Error("synth_pcg: duration must be positive");
    if (cfg.sample_rate_hz <= 0) throw Error("synth_pcg: sample rate must be positive");
    if (cfg.noise_rms < 0.0) throw Error("synth_pcg: noise_rms must be non-negative");
    const double cycle_s = 60.0 / cfg.bpm;
    if (cfg.duration_s < cycle_s)
        throw Error("synth_pcg: duration must cover at least one full cardiac cycle");

    const int fs = cfg.sample_rate_hz;
    const int n = static_cast<int>(std::llround(cfg.duration_s * fs));
    const int cycles = static_cast<int>(std::floor(cfg.duration_s * cfg.bpm / 60.0));

    const double s1_dur = 0.040, s1_freq = 100.0, s1_amp = 0.8;
    const double s2_dur = 0.030, s2_freq = 150.0, s2_amp = 0.6;

    SynthResult out;
    out.clean.assign(n, 0.0);

    for (int c = 0; c < cycles; ++c) {
        const double t0 = c * cycle_s;
        const double s1_center = t0 + s1_dur;
        const double s2_center = s1_center + 0.3 * cycle_s;
        detail::add_burst(out.clean, fs, s1_center, s1_dur, s1_freq, s1_amp);
        detail::add_burst(out.clean, fs, s2_center, s2_dur, s2_freq, s2_amp);
        out.events.push_back({"s1", s1_center});
        out.events.push_back({"s2", s2_center});
    }

    if (cfg.murmur) {
        Rng rng(cfg.seed ^ 0x6d75726d75720001ull);
        Signal noise(n);
        for (auto& v : noise) v = rng.normal();
        const FirFilter bp = design_bandpass(120.0, 400.0, fs, scaled_fir_order(128, fs));
        noise = apply_fir(bp, noise);
        const double murmur_rms = 3.0 * std::max(cfg.noise_rms, 0.01);
        const double base = rms(noise);
        if (base > 0.0)
            for (auto& v : noise) v *= murmur_rms / base;
        // fill each systolic interval, with short cosine ramps at both ends
        for (int c = 0; c < cycles; ++c) {
            const double t0 = c * cycle_s;
            const double from = t0 + s1_dur + s1_dur / 2.0;
            const double to = t0 + s1_dur + 0.3 * cycle_s - s2_dur / 2.0;
            const int a = static_cast<int>(std::lround(from * fs));
            const int b = std::min(n - 1, static_cast<int>(std::lround(to * fs)));
            const int ramp = std::max(1, fs / 200);  // 5 ms
            for (int i = a; i <= b; ++i) {
                double w = 1.0;
                if (i - a < ramp) w = 0.5 - 0.5 * std::cos(3.14159265358979323846 * (i - a) / ramp);
                if (b - i < ramp) w = std::min(w, 0.5 - 0.5 * std::cos(3.14159265358979323846 * (b - i) / ramp));
                out.clean[i] += w * noise[i];
            }
        }
    }

    if (cfg.extrasystole && cycles > 0) {
        Rng rng(cfg.seed ^ 0x657874726100beefull);
        const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(cycles)));
        const double t0 = c * cycle_s;
        const double s2_center = t0 + s1_dur + 0.3 * cycle_s;
        const double next_s1 = t0 + cycle_s + s1_dur;
        const double center = 0.5 * (s2_center + s2_dur / 2.0 + next_s1 - s1_dur / 2.0);
        detail::add_burst(out.clean, fs, center, s1_dur, s1_freq, s1_amp * 0.9);
        out.events.push_back({"extra", center});
    }

    out.audio.samples = out.clean;
    if (cfg.noise_rms > 0.0) {
        Rng rng(cfg.seed ^ 0x77686974650be5e1ull);
        for (auto& v : out.audio.samples) v += rng.normal(0.0, cfg.noise_rms);
    }

    // keep within write_wav's admissible range
    double peak = 0.0;
    for (double v : out.audio.samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.99) {
        const double k = 0.99 / peak;
        for (auto& v : out.audio.samples) v *= k;
        for (auto& v : out.clean) v *= k;
    }

    out.audio.sample_rate_hz = fs;
    out.audio.label = cfg.murmur ? Label::murmur
                                 : (cfg.extrasystole ? Label::extrasys : Label::normal);
    return out;
}

inline nlohmann::json synth_events_json(const SynthConfig& cfg, const SynthResult& r) {
    nlohmann::json j;
    j["bpm"] = cfg.bpm;
    j["duration_s"] = cfg.duration_s;
    j["sample_rate_hz"] = cfg.sample_rate_hz;
    j["murmur"] = cfg.murmur;
    j["extrasystole"] = cfg.extrasystole;
    j["noise_rms"] = cfg.noise_rms;
    j["seed"] = cfg.seed;
    j["events"] = nlohmann::json::array();
    for (const auto& e : r.events) j["events"].push_back({{"kind", e.kind}, {"time_s", e.time_s}});
    return j;
}

}  // namespace pcgkit
