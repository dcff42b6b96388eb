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

#include <mle/audio_dsp.hpp>
#include <mle/error.hpp>
#include <mle/synth.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace mle::synth {

namespace {

using metrics::SuccessLabel;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::vector<SuccessLabel> plant_labels(const SessionCohortSpec& spec, std::mt19937_64& rng) {
    const std::size_t n = spec.participants * 4;
    if (spec.positives > n) throw Error(ErrorCode::BadArgument, "more positives than sessions");
    std::vector<SuccessLabel> y(n, SuccessLabel::Unsuccessful);// index = participant * 4 + scenario - 1
    std::vector<std::size_t> free;
    std::size_t remaining = spec.positives;
    if (spec.participants == 51) {
        // Scenario 1 -> 4 transitions [[20,3],[12,16]].
        for (std::size_t p = 0; p < 51; ++p) {
            const bool s1 = p < 23;
            const bool s4 = p < 20 || (p >= 23 && p < 35);
            if (s1) y[p * 4] = SuccessLabel::Successful;
            if (s4) y[p * 4 + 3] = SuccessLabel::Successful;
            free.push_back(p * 4 + 1);
            free.push_back(p * 4 + 2);
        }
        if (remaining < 55 || remaining - 55 > free.size()) {
            throw Error(ErrorCode::BadArgument, "positives must lie in [55, 157] for the 51-participant layout");
        }
        remaining -= 55;
    } else {
        free.resize(n);
        std::iota(free.begin(), free.end(), 0);
    }
    std::shuffle(free.begin(), free.end(), rng);
    for (std::size_t k = 0; k < remaining; ++k) y[free[k]] = SuccessLabel::Successful;
    return y;
}

AudioTrack session_audio(bool success, const SessionCohortSpec& spec, std::mt19937_64& rng) {
    const double dir = success ? 1.0 : -1.0;
    const double f0 = 125.0 + spec.signal * 25.0 * dir + uniform(rng, -12.0, 12.0);
    const double syllable_s = 0.2 - spec.signal * 0.04 * dir + uniform(rng, -0.02, 0.02);
    constexpr double kDip = 0.1;
    const int per_phrase = std::max(2, static_cast<int>(std::lround((spec.speech_s / 2.0 + kDip) / (syllable_s + kDip))));
    auto res = neutral_vowel();
    for (auto& r : res) r.freq_hz *= 1.0 + uniform(rng, -0.08, 0.08);
    const double peak = uniform(rng, 0.3, 0.6);
    const std::vector<AudioTrack> parts{silence(0.3, spec.rate),
                                        syllable_train(per_phrase, syllable_s, kDip, f0, res, spec.rate, peak),
                                        silence(uniform(rng, 0.4, 0.8), spec.rate),
                                        syllable_train(per_phrase, syllable_s, kDip, f0, res, spec.rate, peak),
                                        silence(0.3, spec.rate)};
    const auto speech = concat(parts);
    return add(speech, white_noise(speech.duration(), spec.rate, 1e-4, rng()));
}

std::vector<emotion::EmotionFrame> session_emotions(double duration, double fps, std::mt19937_64& rng) {
    std::vector<emotion::EmotionFrame> frames;
    const auto n = static_cast<std::size_t>(std::floor(duration * fps));
    std::size_t dominant = static_cast<std::size_t>(uniform_int(rng, 0, emotion::kEmotionCount - 1));
    for (std::size_t k = 0; k < n; ++k) {
        if (uniform(rng, 0.0, 1.0) < 0.1) dominant = static_cast<std::size_t>(uniform_int(rng, 0, emotion::kEmotionCount - 1));
        emotion::EmotionFrame f;
        f.t = static_cast<double>(k) / fps;
        for (auto& p : f.p) p = uniform(rng, 0.0, 0.1);
        f.p[dominant] = uniform(rng, 0.5, 0.9);
        frames.push_back(f);
    }
    return frames;
}

store::EventStream rating_stream(double duration, double p_pos, double p_neg, std::mt19937_64& rng) {
    store::EventStream s;
    for (int k = 0; k < 3; ++k) {
        const double t = duration * (k + uniform(rng, 0.0, 0.9)) / 3.0;
        const double u = uniform(rng, 0.0, 1.0);
        const auto v = u < p_pos ? store::ImpactValue::Positive
                                 : (u < p_pos + p_neg ? store::ImpactValue::Negative : store::ImpactValue::Neutral);
        s.events.push_back({t, v});
    }
    return s;
}

}// namespace

FeatureCohort make_feature_cohort(const FeatureCohortSpec& spec) {
    const auto& reg = dsp::feature_registry();
    if (spec.informative + spec.duplicates > reg.size() || spec.duplicates > spec.informative) {
        throw Error(ErrorCode::BadArgument, "feature cohort layout does not fit 53 columns");
    }
    if (spec.positives == 0 || spec.positives >= spec.sessions) throw Error(ErrorCode::BadArgument, "cohort needs both classes");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<std::size_t> slot(reg.size());
    std::iota(slot.begin(), slot.end(), 0);
    std::shuffle(slot.begin(), slot.end(), rng);

    FeatureCohort c;
    for (const auto& f : reg) c.data.feature_names.emplace_back(f.name);
    for (std::size_t k = 0; k < spec.informative; ++k) c.informative.push_back(c.data.feature_names[slot[k]]);
    for (std::size_t k = 0; k < spec.duplicates; ++k) c.duplicates.push_back(c.data.feature_names[slot[spec.informative + k]]);

    std::vector<SuccessLabel> labels(spec.sessions, SuccessLabel::Unsuccessful);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(spec.positives), SuccessLabel::Successful);
    std::shuffle(labels.begin(), labels.end(), rng);

    for (std::size_t i = 0; i < spec.sessions; ++i) {
        predict::Row row;
        char id[32];
        std::snprintf(id, sizeof id, "S%03zu", i + 1);
        row.session_id = id;
        row.y = labels[i];
        row.x.resize(reg.size());
        const double half = 0.5 * spec.effect * predict::sign(labels[i]);
        for (auto& v : row.x) v = noise(rng);
        for (std::size_t k = 0; k < spec.informative; ++k) row.x[slot[k]] += half;
        for (std::size_t k = 0; k < spec.duplicates; ++k) {
            row.x[slot[spec.informative + k]] = row.x[slot[k]] + spec.duplicate_noise * noise(rng);
        }
        c.data.rows.push_back(std::move(row));
    }
    return c;
}

std::vector<store::Session> make_session_cohort(const SessionCohortSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    const auto labels = plant_labels(spec, rng);
    std::vector<store::Session> out;
    for (std::size_t p = 0; p < spec.participants; ++p) {
        for (int sc = 1; sc <= 4; ++sc) {
            const bool success = labels[p * 4 + static_cast<std::size_t>(sc - 1)] == SuccessLabel::Successful;
            store::Session s;
            char pid[32];
            std::snprintf(pid, sizeof pid, "P%03zu", p + 1);
            s.participant_id = pid;
            s.session_id = s.participant_id + "_S" + std::to_string(sc);
            s.scenario_id = sc;
            s.participant_audio = session_audio(success, spec, rng);
            s.duration = s.participant_audio->duration();
            s.emotion_fps = spec.emotion_fps;
            s.emotion_frames = session_emotions(s.duration, spec.emotion_fps, rng);
            s.impact_events = success ? rating_stream(s.duration, 0.7, 0.1, rng) : rating_stream(s.duration, 0.1, 0.7, rng);
            s.self_events = rating_stream(s.duration, 0.4, 0.3, rng);
            s.eoi_events = store::EventStream{{{s.duration * uniform(rng, 0.1, 0.9),
                                                uniform(rng, 0.0, 1.0) < 0.5 ? store::ImpactValue::EoiPositive
                                                                             : store::ImpactValue::EoiNegative}}};
            store::SurveyResponses sv;
            sv.survey_i_item1 = success ? uniform_int(rng, 7, 10) : uniform_int(rng, 1, 6);
            sv.survey_i_item2 = success ? uniform_int(rng, 7, 10) : uniform_int(rng, 1, 6);
            sv.survey_p = uniform_int(rng, 1, 10);
            sv.self_estimate = success ? uniform_int(rng, 5, 10) : uniform_int(rng, 1, 8);
            s.survey = sv;
            out.push_back(std::move(s));
        }
    }
    return out;
}

}// namespace mle::synth
