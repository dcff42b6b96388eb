/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include "dsp_internal.hpp"

#include <mle/error.hpp>

#include <json.hpp>

#include <algorithm>
#include <functional>

namespace mle::dsp {

namespace {

using enum FeatureSubset;

constexpr std::array<FeatureSpec, kAudioFeatureCount> kRegistry{{
    {"f0_mean_hz", "Hz", Voice, "mean F0 over voiced windows"},
    {"f0_median_hz", "Hz", Voice, "median F0 over voiced windows"},
    {"f0_min_hz", "Hz", Voice, "minimum window F0"},
    {"f0_max_hz", "Hz", Voice, "maximum window F0"},
    {"f0_sd_hz", "Hz", Voice, "population standard deviation of window F0"},
    {"f0_range_hz", "Hz", Voice, "f0_max_hz - f0_min_hz"},
    {"jitter_local", "ratio", Voice, "mean |T[k+1]-T[k]| / mean T, averaged over voiced windows"},
    {"jitter_local_abs_s", "s", Voice, "mean |T[k+1]-T[k]|, averaged over voiced windows"},
    {"jitter_rap", "ratio", Voice, "mean |T[k] - mean(T[k-1..k+1])| / mean T"},
    {"jitter_ppq5", "ratio", Voice, "mean |T[k] - mean(T[k-2..k+2])| / mean T"},
    {"jitter_ddp", "ratio", Voice, "mean |(T[k+1]-T[k]) - (T[k]-T[k-1])| / mean T"},
    {"shimmer_local", "ratio", Voice, "mean |A[k+1]-A[k]| / mean A, averaged over voiced windows"},
    {"shimmer_local_db", "dB", Voice, "mean |20 log10(A[k+1]/A[k])|"},
    {"shimmer_apq3", "ratio", Voice, "mean |A[k] - mean(A[k-1..k+1])| / mean A"},
    {"shimmer_apq5", "ratio", Voice, "mean |A[k] - mean(A[k-2..k+2])| / mean A"},
    {"shimmer_apq11", "ratio", Voice, "mean |A[k] - mean(A[k-5..k+5])| / mean A"},
    {"shimmer_dda", "ratio", Voice, "mean |(A[k+1]-A[k]) - (A[k]-A[k-1])| / mean A"},
    {"hnr_mean_db", "dB", Voice, "mean of 10 log10(r/(1-r)) over active windows, capped at +/-40 dB"},
    {"hnr_sd_db", "dB", Voice, "population standard deviation of window HNR"},
    {"f1_mean_hz", "Hz", Voice, "mean F1 over voiced windows"},
    {"f1_median_hz", "Hz", Voice, "median F1 over voiced windows"},
    {"f1_sd_hz", "Hz", Voice, "population standard deviation of F1"},
    {"f1_bandwidth_hz", "Hz", Voice, "mean F1 bandwidth"},
    {"f2_mean_hz", "Hz", Voice, "mean F2 over voiced windows"},
    {"f2_median_hz", "Hz", Voice, "median F2 over voiced windows"},
    {"f2_sd_hz", "Hz", Voice, "population standard deviation of F2"},
    {"f2_bandwidth_hz", "Hz", Voice, "mean F2 bandwidth"},
    {"f3_mean_hz", "Hz", Voice, "mean F3 over voiced windows"},
    {"f3_median_hz", "Hz", Voice, "median F3 over voiced windows"},
    {"f3_sd_hz", "Hz", Voice, "population standard deviation of F3"},
    {"f3_bandwidth_hz", "Hz", Voice, "mean F3 bandwidth"},
    {"f4_mean_hz", "Hz", Voice, "mean F4 over voiced windows"},
    {"f4_median_hz", "Hz", Voice, "median F4 over voiced windows"},
    {"f4_sd_hz", "Hz", Voice, "population standard deviation of F4"},
    {"f4_bandwidth_hz", "Hz", Voice, "mean F4 bandwidth"},
    {"intensity_mean_db", "dBFS", Voice, "mean window RMS level over active windows"},
    {"intensity_sd_db", "dB", Voice, "population standard deviation of window RMS level"},
    {"intensity_max_db", "dBFS", Voice, "maximum window RMS level"},
    {"formant_average_hz", "Hz", Formant, "(F1+F2+F3+F4)/4 of the formant means"},
    {"formant_dispersion_hz", "Hz", Formant, "(F4-F1)/3"},
    {"formant_spacing_hz", "Hz", Formant, "least-squares fit of F_i = (2i-1)/2 * spacing"},
    {"vocal_tract_length_cm", "cm", Formant, "35000 / (2 * spacing)"},
    {"gpr_vtl_interaction", "Hz*cm", Formant, "f0_mean_hz * vocal_tract_length_cm"},
    {"speech_duration_s", "s", Timing, "track length"},
    {"phonation_time_s", "s", Timing, "sum of voiced segment lengths"},
    {"num_syllables", "count", Timing, "intensity peaks with a 2 dB dip on both sides"},
    {"num_pauses", "count", Timing, "gaps between voiced segments of at least 0.3 s"},
    {"speech_rate", "1/s", Timing, "num_syllables / speech_duration_s"},
    {"articulation_rate", "1/s", Timing, "num_syllables / phonation_time_s"},
    {"avg_syllable_duration_s", "s", Timing, "phonation_time_s / num_syllables"},
    {"phonation_ratio", "ratio", Timing, "phonation_time_s / speech_duration_s"},
    {"mean_pause_s", "s", Timing, "mean pause length"},
    {"pause_rate_per_min", "1/min", Timing, "60 * num_pauses / speech_duration_s"},
}};

std::size_t index_of(std::string_view name) {
    for (std::size_t i = 0; i < kRegistry.size(); ++i) {
        if (kRegistry[i].name == name) return i;
    }
    throw Error(ErrorCode::OutOfRange, "unknown feature " + std::string(name));
}

// Mean of per-window values of one measure; windows that are too short for it
// are skipped.
class WindowAverage {
public:
    void add(const std::function<double()>& f) {
        try {
            values_.push_back(f());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TooFewPeriods) throw;
        }
    }
    std::optional<double> mean() const {
        if (values_.empty()) return std::nullopt;
        return detail::mean(values_);
    }

private:
    std::vector<double> values_;
};

}// namespace

const std::array<FeatureSpec, kAudioFeatureCount>& feature_registry() {
    return kRegistry;
}

std::string feature_registry_json() {
    nlohmann::ordered_json doc;
    doc["version"] = kFeatureRegistryVersion;
    doc["count"] = kAudioFeatureCount;
    auto& list = doc["features"] = nlohmann::ordered_json::array();
    for (const auto& f : kRegistry) {
        list.push_back({{"name", f.name}, {"unit", f.unit}, {"subset", static_cast<int>(f.subset)}, {"formula", f.formula}});
    }
    return doc.dump(2) + "\n";
}

FeatureVector audio_feature_vector(const AudioTrack& track, const DspConfig& cfg) {
    FeatureVector fv;
    if (track.samples.empty()) return fv;
    const AudioTrack filtered{highpass(track.samples, track.sample_rate, cfg.highpass_cutoff_hz), track.sample_rate};
    const auto segments = vad(filtered, cfg);
    if (segments.empty()) return fv;
    const AudioTrack speech = detail::remove_silence(filtered, segments, cfg);

    const auto pitch = f0_track(speech, cfg);
    std::vector<double> f0s;
    for (const auto& w : pitch.windows) {
        if (w.f0) f0s.push_back(*w.f0);
    }
    if (f0s.empty()) return fv;

    auto& v = fv.values;
    const auto set = [&](std::string_view name, std::optional<double> value) { v[index_of(name)] = value; };

    const auto [f0_min, f0_max] = std::minmax_element(f0s.begin(), f0s.end());
    set("f0_mean_hz", detail::mean(f0s));
    set("f0_median_hz", detail::median(f0s));
    set("f0_min_hz", *f0_min);
    set("f0_max_hz", *f0_max);
    set("f0_sd_hz", detail::population_sd(f0s));
    set("f0_range_hz", *f0_max - *f0_min);

    double fs = 0.0;
    const auto x = detail::pitch_signal(speech, fs);
    const auto spans = detail::analysis_windows(x.size(), fs, cfg.window_s);
    WindowAverage j_local, j_abs, j_rap, j_ppq5, j_ddp, s_local, s_db, s_apq3, s_apq5, s_apq11, s_dda;
    std::vector<double> hnrs, levels;
    for (std::size_t i = 0; i < pitch.windows.size() && i < spans.size(); ++i) {
        const auto& pw = pitch.windows[i];
        const std::span<const double> win(x.data() + spans[i].begin, spans[i].end - spans[i].begin);
        if (pw.active) {
            hnrs.push_back(hnr_from_periodicity(pw.periodicity));
            levels.push_back(detail::rms_db(win));
        }
        if (!pw.f0) continue;
        const auto c = extract_cycles(win, fs, *pw.f0);
        const std::span<const double> T = c.periods_s;
        const std::span<const double> A = c.amplitudes;
        j_local.add([&] { return jitter(T); });
        j_abs.add([&] { return jitter(T) * detail::mean(T); });
        j_rap.add([&] { return jitter_rap(T); });
        j_ppq5.add([&] { return jitter_ppq5(T); });
        j_ddp.add([&] { return jitter_ddp(T); });
        s_local.add([&] { return shimmer(A); });
        if (std::all_of(A.begin(), A.end(), [](double a) { return a > 0.0; })) s_db.add([&] { return shimmer_db(A); });
        s_apq3.add([&] { return shimmer_apq(A, 3); });
        s_apq5.add([&] { return shimmer_apq(A, 5); });
        s_apq11.add([&] { return shimmer_apq(A, 11); });
        s_dda.add([&] { return shimmer_dda(A); });
    }
    set("jitter_local", j_local.mean());
    set("jitter_local_abs_s", j_abs.mean());
    set("jitter_rap", j_rap.mean());
    set("jitter_ppq5", j_ppq5.mean());
    set("jitter_ddp", j_ddp.mean());
    set("shimmer_local", s_local.mean());
    set("shimmer_local_db", s_db.mean());
    set("shimmer_apq3", s_apq3.mean());
    set("shimmer_apq5", s_apq5.mean());
    set("shimmer_apq11", s_apq11.mean());
    set("shimmer_dda", s_dda.mean());
    if (!hnrs.empty()) {
        set("hnr_mean_db", detail::mean(hnrs));
        set("hnr_sd_db", detail::population_sd(hnrs));
        set("intensity_mean_db", detail::mean(levels));
        set("intensity_sd_db", detail::population_sd(levels));
        set("intensity_max_db", *std::max_element(levels.begin(), levels.end()));
    }

    const auto fm = formants(speech, cfg);
    for (std::size_t k = 0; k < 4; ++k) {
        const std::string p = "f" + std::to_string(k + 1);
        set(p + "_mean_hz", fm.mean[k]);
        set(p + "_median_hz", fm.median[k]);
        set(p + "_sd_hz", fm.stddev[k]);
        set(p + "_bandwidth_hz", fm.bandwidth[k]);
    }
    try {
        const auto d = derived_formant_features(fm.mean, detail::mean(f0s));
        set("formant_average_hz", d.average_hz);
        set("formant_dispersion_hz", d.dispersion_hz);
        set("formant_spacing_hz", d.spacing_hz);
        set("vocal_tract_length_cm", d.vocal_tract_length_cm);
        set("gpr_vtl_interaction", d.gpr_vtl_interaction);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingFormant) throw;
    }

    // Timing uses the unshortened track so pauses are still visible.
    const auto st = speech_stats(filtered, segments, cfg);
    set("speech_duration_s", st.speech_duration_s);
    set("phonation_time_s", st.phonation_time_s);
    set("num_syllables", st.syllables);
    set("num_pauses", st.pauses);
    set("speech_rate", st.speech_rate);
    set("articulation_rate", st.articulation_rate);
    if (st.syllables > 0) set("avg_syllable_duration_s", st.phonation_time_s / st.syllables);
    if (st.speech_duration_s > 0.0) {
        set("phonation_ratio", st.phonation_time_s / st.speech_duration_s);
        set("pause_rate_per_min", 60.0 * st.pauses / st.speech_duration_s);
    }
    set("mean_pause_s", st.mean_pause_s);
    fv.usable = true;
    return fv;
}

}// namespace mle::dsp
