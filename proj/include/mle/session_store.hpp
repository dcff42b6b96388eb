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

#ifndef MLE_SESSION_STORE_HPP
#define MLE_SESSION_STORE_HPP

#include <mle/audio_track.hpp>
#include <mle/emotion_space.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mle::store {

/// Rating levels plus the two instantaneous event-of-interest markers.
enum class ImpactValue { Positive, Neutral, Negative, EoiPositive, EoiNegative };

bool is_ordinal(ImpactValue v);

/// +1 / 0 / -1 for the ordinal levels; OutOfRange for markers.
int valence(ImpactValue v);

/// "positive" | "neutral" | "negative"; markers serialize as 4 and 5.
std::string_view to_string(ImpactValue v);
int eoi_code(ImpactValue v);

struct Event {
    double t = 0.0;
    ImpactValue value = ImpactValue::Neutral;

    bool operator==(const Event&) const = default;
};

/// Timestamped rating changes, strictly increasing in t.
struct EventStream {
    std::vector<Event> events;

    bool operator==(const EventStream&) const = default;
};

inline constexpr double kDefaultRate = 30.0;

/// Ordinal state held on a uniform frame grid; values are in {-1, 0, +1}.
struct SampledSeries {
    double rate = kDefaultRate;
    double t0 = 0.0;
    std::vector<int> values;

    bool operator==(const SampledSeries&) const = default;
};

struct SurveyResponses {
    double survey_i_item1 = 0.0;
    double survey_i_item2 = 0.0;
    double survey_p = 0.0;
    std::optional<double> self_estimate;

    bool operator==(const SurveyResponses&) const = default;
};

struct Session {
    std::string session_id;
    std::string participant_id;
    int scenario_id = 1;
    double duration = 0.0;
    std::optional<AudioTrack> participant_audio;
    std::optional<AudioTrack> inhabiter_audio;
    std::optional<std::vector<emotion::EmotionFrame>> emotion_frames;
    std::optional<double> emotion_fps;
    std::optional<EventStream> impact_events;
    std::optional<EventStream> eoi_events;
    std::optional<EventStream> self_events;
    std::optional<SurveyResponses> survey;

    bool operator==(const Session&) const = default;
};

enum class Severity { Warning, Fatal };

struct Issue {
    Severity severity = Severity::Warning;
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::string session_id;
    std::vector<Issue> issues;
    bool usable = true;
};

/// Allowed skew between the participant audio length and the manifest duration.
inline constexpr double kDurationTolerance = 2.0;

// Bundle file names written by write_bundle.
inline constexpr std::string_view kManifestFile = "manifest.json";

/// Parses a bundle directory (manifest.json plus the files it lists).
Session ingest_bundle(const std::filesystem::path& dir);

/// Serializes a session into `dir` using the canonical file names.
void write_bundle(const Session& session, const std::filesystem::path& dir);

ValidationReport validate_session(const Session& session);

/// Installs an exported self-rating stream into the bundle at `dir`: the text
/// is validated against the manifest duration, written as self.jsonl and
/// listed in the manifest. Both files are replaced atomically; nothing is
/// written when validation fails.
EventStream merge_self_stream(const std::filesystem::path& dir, std::string_view text, const std::string& file);

/// Parses impact/self JSONL ({"t":..,"v":"positive"|"neutral"|"negative"}).
/// Timestamps must be strictly increasing and, when `duration` is given,
/// lie within [0, duration].
EventStream parse_rating_stream(std::string_view text, const std::string& file,
                                std::optional<double> duration = std::nullopt);

/// Parses eoi.jsonl ({"t":..,"v":4|5}).
EventStream parse_eoi_stream(std::string_view text, const std::string& file,
                             std::optional<double> duration = std::nullopt);

std::string serialize_stream(const EventStream& stream);

std::vector<emotion::EmotionFrame> parse_emotions_csv(std::string_view text, const std::string& file);
std::string serialize_emotions_csv(const std::vector<emotion::EmotionFrame>& frames);

SurveyResponses parse_survey(std::string_view text, const std::string& file);
std::string serialize_survey(const SurveyResponses& survey);

/// Number of frames on a grid of `rate` Hz covering `duration` seconds.
std::size_t frame_count(double duration, double rate);

/// Zero-order hold of the ordinal state, sampled at frame centers
/// t_k = (k + 0.5) / rate. Markers do not change the held state; the state
/// before the first ordinal event is Neutral.
SampledSeries resample_events(const EventStream& events, double duration, double rate = kDefaultRate);

/// Inverse view of a series: one event at the start of every frame where
/// the value changes (plus frame 0 when it is not Neutral).
EventStream series_to_events(const SampledSeries& series);

struct AlignedSession {
    double rate = kDefaultRate;
    std::size_t frames = 0;
    SampledSeries impact;
    std::optional<SampledSeries> self;
    /// Marker code (0, 4 or 5) for each grid frame.
    std::vector<int> eoi_markers;
    /// For each grid frame, the index of the nearest emotion frame.
    std::vector<std::size_t> emotion_index;
};

/// Puts every stream of a usable session on one frame grid.
AlignedSession align_streams(const Session& session, double rate = kDefaultRate);

}// namespace mle::store

#endif// MLE_SESSION_STORE_HPP
