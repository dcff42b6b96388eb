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

#include <mle/error.hpp>
#include <mle/session_store.hpp>
#include <mle/text_util.hpp>

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace mle::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kParticipantWav = "participant.wav";
constexpr std::string_view kInhabiterWav = "inhabiter.wav";
constexpr std::string_view kEmotionsCsv = "emotions.csv";
constexpr std::string_view kImpactJsonl = "impact.jsonl";
constexpr std::string_view kEoiJsonl = "eoi.jsonl";
constexpr std::string_view kSelfJsonl = "self.jsonl";
constexpr std::string_view kSurveyJson = "survey.json";

void check_event_time(double t, std::optional<double> duration, const std::string& file, std::size_t line) {
    if (!std::isfinite(t) || t < 0.0) throw MalformedStream(file, line, "timestamp must be a non-negative number");
    if (duration && t > *duration) {
        throw MalformedStream(file, line,
                              "timestamp " + text::format_double(t) + " beyond session duration " +
                                  text::format_double(*duration));
    }
}

template <typename ValueParser>
EventStream parse_stream(std::string_view text, const std::string& file, std::optional<double> duration,
                         ValueParser parse_value) {
    EventStream stream;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text::trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception&) {
            throw MalformedStream(file, line_no, "line is not valid JSON");
        }
        if (!obj.is_object() || !obj.contains("t") || !obj.contains("v") || !obj["t"].is_number()) {
            throw MalformedStream(file, line_no, "expected {\"t\": <seconds>, \"v\": <value>}");
        }
        const double t = obj["t"].get<double>();
        check_event_time(t, duration, file, line_no);
        const ImpactValue v = parse_value(obj["v"], file, line_no);
        if (!stream.events.empty() && !(t > stream.events.back().t)) {
            throw Error(ErrorCode::NonMonotonicTimestamps,
                        file + ":" + std::to_string(line_no) + ": timestamp " + text::format_double(t) +
                            " does not follow " + text::format_double(stream.events.back().t));
        }
        stream.events.push_back({t, v});
        if (end == text.size()) break;
    }
    return stream;
}

double survey_item(const json& doc, const char* key, const std::string& file) {
    if (!doc.contains(key) || !doc[key].is_number()) {
        throw MalformedStream(file, 0, std::string("missing numeric '") + key + "'");
    }
    const double v = doc[key].get<double>();
    if (!(v >= 1.0 && v <= 10.0)) {
        throw MalformedStream(file, 0, std::string("'") + key + "' outside 1..10");
    }
    return v;
}

json number_json(double v) {
    // Integral Likert answers stay integers in the file.
    if (std::floor(v) == v && std::abs(v) < 1e9) return static_cast<long long>(v);
    return v;
}

std::optional<std::string> manifest_file(const json& files, const char* key) {
    if (!files.contains(key) || files[key].is_null()) return std::nullopt;
    if (!files[key].is_string()) throw MalformedStream(std::string(kManifestFile), 0, std::string("files.") + key + " must be a string");
    return files[key].get<std::string>();
}

std::string load_listed(const fs::path& dir, const std::string& name) {
    const fs::path p = dir / name;
    if (!fs::is_regular_file(p)) throw MalformedStream(name, 0, "listed in manifest but not found");
    return text::read_file(p);
}

}// namespace

bool is_ordinal(ImpactValue v) {
    return v == ImpactValue::Positive || v == ImpactValue::Neutral || v == ImpactValue::Negative;
}

int valence(ImpactValue v) {
    switch (v) {
        case ImpactValue::Positive: return 1;
        case ImpactValue::Neutral: return 0;
        case ImpactValue::Negative: return -1;
        default: break;
    }
    throw Error(ErrorCode::OutOfRange, "events of interest carry no valence");
}

std::string_view to_string(ImpactValue v) {
    switch (v) {
        case ImpactValue::Positive: return "positive";
        case ImpactValue::Neutral: return "neutral";
        case ImpactValue::Negative: return "negative";
        case ImpactValue::EoiPositive: return "4";
        case ImpactValue::EoiNegative: return "5";
    }
    return "?";
}

int eoi_code(ImpactValue v) {
    if (v == ImpactValue::EoiPositive) return 4;
    if (v == ImpactValue::EoiNegative) return 5;
    return 0;
}

EventStream parse_rating_stream(std::string_view text, const std::string& file, std::optional<double> duration) {
    return parse_stream(text, file, duration, [](const json& v, const std::string& f, std::size_t line) {
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "positive") return ImpactValue::Positive;
            if (s == "neutral") return ImpactValue::Neutral;
            if (s == "negative") return ImpactValue::Negative;
        }
        throw MalformedStream(f, line, "rating must be \"positive\", \"neutral\" or \"negative\"");
    });
}

EventStream parse_eoi_stream(std::string_view text, const std::string& file, std::optional<double> duration) {
    return parse_stream(text, file, duration, [](const json& v, const std::string& f, std::size_t line) {
        if (v.is_number_integer()) {
            const auto code = v.get<long long>();
            if (code == 4) return ImpactValue::EoiPositive;
            if (code == 5) return ImpactValue::EoiNegative;
        }
        throw MalformedStream(f, line, "event-of-interest code must be 4 or 5");
    });
}

std::string serialize_stream(const EventStream& stream) {
    std::string out;
    for (const auto& e : stream.events) {
        json obj;
        obj["t"] = e.t;
        if (is_ordinal(e.value)) {
            obj["v"] = std::string(to_string(e.value));
        } else {
            obj["v"] = eoi_code(e.value);
        }
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::vector<emotion::EmotionFrame> parse_emotions_csv(std::string_view text, const std::string& file) {
    std::vector<emotion::EmotionFrame> frames;
    std::vector<std::size_t> column_to_index;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text::trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto cells = text::split(line, ',');
        if (column_to_index.empty()) {
            if (cells.size() != emotion::kEmotionCount + 2 || text::trim(cells[0]) != "frame" ||
                text::trim(cells[1]) != "t_s") {
                throw MalformedStream(file, line_no, "header must be frame,t_s,<48 emotion names>");
            }
            std::vector<bool> seen(emotion::kEmotionCount, false);
            for (std::size_t c = 2; c < cells.size(); ++c) {
                const auto idx = emotion::canonical_index(text::trim(cells[c]));
                if (!idx) throw MalformedStream(file, line_no, "unknown emotion column '" + cells[c] + "'");
                if (seen[*idx]) throw MalformedStream(file, line_no, "duplicate emotion column '" + cells[c] + "'");
                seen[*idx] = true;
                column_to_index.push_back(*idx);
            }
            continue;
        }
        if (cells.size() != emotion::kEmotionCount + 2) {
            throw MalformedStream(file, line_no, "expected " + std::to_string(emotion::kEmotionCount + 2) + " columns");
        }
        emotion::EmotionFrame frame;
        const auto t = text::parse_double(cells[1]);
        if (!t || *t < 0.0) throw MalformedStream(file, line_no, "t_s must be a non-negative number");
        frame.t = *t;
        for (std::size_t c = 2; c < cells.size(); ++c) {
            const auto p = text::parse_double(cells[c]);
            if (!p || *p < 0.0 || *p > 1.0) throw MalformedStream(file, line_no, "probability outside [0,1]");
            frame.p[column_to_index[c - 2]] = *p;
        }
        if (!frames.empty() && !(frame.t > frames.back().t)) {
            throw Error(ErrorCode::NonMonotonicTimestamps,
                        file + ":" + std::to_string(line_no) + ": frame time does not increase");
        }
        frames.push_back(frame);
    }
    if (column_to_index.empty()) throw MalformedStream(file, 0, "missing header");
    return frames;
}

std::string serialize_emotions_csv(const std::vector<emotion::EmotionFrame>& frames) {
    std::string out = "frame,t_s";
    for (auto name : emotion::canonical_names()) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < frames.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += text::format_double(frames[i].t);
        for (double p : frames[i].p) {
            out += ',';
            out += text::format_double(p);
        }
        out += '\n';
    }
    return out;
}

SurveyResponses parse_survey(std::string_view text, const std::string& file) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception&) {
        throw MalformedStream(file, 0, "not valid JSON");
    }
    if (!doc.is_object()) throw MalformedStream(file, 0, "expected a JSON object");
    SurveyResponses s;
    s.survey_i_item1 = survey_item(doc, "survey_i_item1", file);
    s.survey_i_item2 = survey_item(doc, "survey_i_item2", file);
    s.survey_p = survey_item(doc, "survey_p", file);
    if (doc.contains("self_estimate") && !doc["self_estimate"].is_null()) {
        s.self_estimate = survey_item(doc, "self_estimate", file);
    }
    return s;
}

std::string serialize_survey(const SurveyResponses& survey) {
    json doc;
    doc["survey_i_item1"] = number_json(survey.survey_i_item1);
    doc["survey_i_item2"] = number_json(survey.survey_i_item2);
    doc["survey_p"] = number_json(survey.survey_p);
    if (survey.self_estimate) doc["self_estimate"] = number_json(*survey.self_estimate);
    return doc.dump(2) + "\n";
}

Session ingest_bundle(const fs::path& dir) {
    const fs::path manifest_path = dir / kManifestFile;
    if (!fs::is_regular_file(manifest_path)) {
        throw Error(ErrorCode::MissingManifest, "no manifest.json in " + dir.string());
    }
    const std::string manifest_name(kManifestFile);
    json m;
    try {
        m = json::parse(text::read_file(manifest_path));
    } catch (const json::exception& e) {
        throw MalformedStream(manifest_name, 0, e.what());
    }

    Session s;
    json files;
    std::optional<int> audio_hz;
    try {
        s.session_id = m.at("session_id").get<std::string>();
        s.participant_id = m.at("participant_id").get<std::string>();
        s.scenario_id = m.at("scenario_id").get<int>();
        s.duration = m.at("duration_s").get<double>();
        files = m.at("files");
        if (m.contains("sample_rates")) {
            const auto& rates = m["sample_rates"];
            if (rates.contains("participant_audio_hz") && !rates["participant_audio_hz"].is_null()) {
                audio_hz = rates["participant_audio_hz"].get<int>();
            }
            if (rates.contains("emotion_fps") && !rates["emotion_fps"].is_null()) {
                s.emotion_fps = rates["emotion_fps"].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw MalformedStream(manifest_name, 0, e.what());
    }
    if (s.scenario_id < 1 || s.scenario_id > 4) throw MalformedStream(manifest_name, 0, "scenario_id must be 1..4");
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) throw MalformedStream(manifest_name, 0, "duration_s must be positive");
    if (!files.is_object()) throw MalformedStream(manifest_name, 0, "files must be an object");
    if (audio_hz) check_sample_rate(*audio_hz, "manifest participant_audio_hz");

    if (auto name = manifest_file(files, "participant_audio")) {
        if (!audio_hz) throw MalformedStream(manifest_name, 0, "sample_rates.participant_audio_hz is required with participant audio");
        AudioTrack track = decode_wav(load_listed(dir, *name), *name);
        if (track.sample_rate != *audio_hz) {
            throw MalformedStream(*name, 0, "header rate " + std::to_string(track.sample_rate) +
                                                " Hz differs from manifest " + std::to_string(*audio_hz) + " Hz");
        }
        s.participant_audio = std::move(track);
    }
    if (auto name = manifest_file(files, "inhabiter_audio")) {
        s.inhabiter_audio = decode_wav(load_listed(dir, *name), *name);
    }
    if (auto name = manifest_file(files, "emotions")) {
        s.emotion_frames = parse_emotions_csv(load_listed(dir, *name), *name);
    }
    if (auto name = manifest_file(files, "impact")) {
        s.impact_events = parse_rating_stream(load_listed(dir, *name), *name, s.duration);
    }
    if (auto name = manifest_file(files, "eoi")) {
        s.eoi_events = parse_eoi_stream(load_listed(dir, *name), *name, s.duration);
    }
    if (auto name = manifest_file(files, "self")) {
        s.self_events = parse_rating_stream(load_listed(dir, *name), *name, s.duration);
    }
    if (auto name = manifest_file(files, "survey")) {
        s.survey = parse_survey(load_listed(dir, *name), *name);
    }
    return s;
}

void write_bundle(const Session& s, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());

    json files = json::object();
    json rates = json::object();
    if (s.participant_audio) {
        write_wav(dir / kParticipantWav, *s.participant_audio);
        files["participant_audio"] = kParticipantWav;
        rates["participant_audio_hz"] = s.participant_audio->sample_rate;
    }
    if (s.inhabiter_audio) {
        write_wav(dir / kInhabiterWav, *s.inhabiter_audio);
        files["inhabiter_audio"] = kInhabiterWav;
    }
    if (s.emotion_frames) {
        text::write_file_atomic(dir / kEmotionsCsv, serialize_emotions_csv(*s.emotion_frames));
        files["emotions"] = kEmotionsCsv;
    }
    if (s.emotion_fps) rates["emotion_fps"] = *s.emotion_fps;
    if (s.impact_events) {
        text::write_file_atomic(dir / kImpactJsonl, serialize_stream(*s.impact_events));
        files["impact"] = kImpactJsonl;
    }
    if (s.eoi_events) {
        text::write_file_atomic(dir / kEoiJsonl, serialize_stream(*s.eoi_events));
        files["eoi"] = kEoiJsonl;
    }
    if (s.self_events) {
        text::write_file_atomic(dir / kSelfJsonl, serialize_stream(*s.self_events));
        files["self"] = kSelfJsonl;
    }
    if (s.survey) {
        text::write_file_atomic(dir / kSurveyJson, serialize_survey(*s.survey));
        files["survey"] = kSurveyJson;
    }

    json m;
    m["session_id"] = s.session_id;
    m["participant_id"] = s.participant_id;
    m["scenario_id"] = s.scenario_id;
    m["duration_s"] = s.duration;
    m["files"] = files;
    m["sample_rates"] = rates;
    text::write_file_atomic(dir / kManifestFile, m.dump(2) + "\n");
}

ValidationReport validate_session(const Session& s) {
    ValidationReport r;
    r.session_id = s.session_id;
    const auto fatal = [&](std::string code, std::string msg) {
        r.issues.push_back({Severity::Fatal, std::move(code), std::move(msg)});
    };
    const auto warn = [&](std::string code, std::string msg) {
        r.issues.push_back({Severity::Warning, std::move(code), std::move(msg)});
    };

    if (!s.participant_audio) {
        fatal("missing_participant_audio", "participant audio is required");
    } else {
        const double len = s.participant_audio->duration();
        if (std::abs(len - s.duration) > kDurationTolerance) {
            fatal("duration_mismatch", "participant audio lasts " + text::format_double(len) +
                                           " s but manifest says " + text::format_double(s.duration) + " s");
        }
    }
    if (!s.impact_events) fatal("missing_impact", "IMPACT stream is required");
    if (!s.survey) fatal("missing_survey", "post-conversation survey is required");

    if (!s.inhabiter_audio) warn("missing_inhabiter_audio", "no inhabiter audio");
    if (!s.emotion_frames) {
        warn("missing_emotions", "no emotion frames; video features unavailable");
    } else if (s.emotion_frames->empty()) {
        warn("empty_emotions", "emotion file has no frames");
    }
    if (!s.eoi_events) warn("missing_eoi", "no events-of-interest stream");
    if (!s.self_events) warn("missing_self", "no self-assessment stream");
    if (s.survey && !s.survey->self_estimate) warn("missing_self_estimate", "survey has no self estimate");

    r.usable = std::none_of(r.issues.begin(), r.issues.end(),
                            [](const Issue& i) { return i.severity == Severity::Fatal; });
    return r;
}

std::size_t frame_count(double duration, double rate) {
    if (!(duration > 0.0) || !(rate > 0.0)) throw Error(ErrorCode::OutOfRange, "duration and rate must be positive");
    return static_cast<std::size_t>(std::ceil(duration * rate - 1e-9));
}

SampledSeries resample_events(const EventStream& events, double duration, double rate) {
    SampledSeries out;
    out.rate = rate;
    out.t0 = 0.0;
    out.values.resize(frame_count(duration, rate));
    int state = 0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        const double center = (static_cast<double>(k) + 0.5) / rate;
        while (next < events.events.size() && events.events[next].t <= center) {
            if (is_ordinal(events.events[next].value)) state = valence(events.events[next].value);
            ++next;
        }
        out.values[k] = state;
    }
    return out;
}

EventStream series_to_events(const SampledSeries& series) {
    EventStream out;
    int prev = 0;
    for (std::size_t k = 0; k < series.values.size(); ++k) {
        const int v = series.values[k];
        if (v != prev) {
            const ImpactValue value = v > 0 ? ImpactValue::Positive : v < 0 ? ImpactValue::Negative : ImpactValue::Neutral;
            out.events.push_back({series.t0 + static_cast<double>(k) / series.rate, value});
            prev = v;
        }
    }
    return out;
}

AlignedSession align_streams(const Session& s, double rate) {
    const auto report = validate_session(s);
    if (!report.usable) throw Error(ErrorCode::UnusableSession, "session " + s.session_id + " is not usable");

    AlignedSession a;
    a.rate = rate;
    a.frames = frame_count(s.duration, rate);
    a.impact = resample_events(*s.impact_events, s.duration, rate);
    if (s.self_events) a.self = resample_events(*s.self_events, s.duration, rate);

    a.eoi_markers.assign(a.frames, 0);
    if (s.eoi_events) {
        for (const auto& e : s.eoi_events->events) {
            const auto k = std::min(a.frames - 1, static_cast<std::size_t>(std::floor(e.t * rate)));
            a.eoi_markers[k] = eoi_code(e.value);
        }
    }

    if (s.emotion_frames && !s.emotion_frames->empty()) {
        const auto& frames = *s.emotion_frames;
        a.emotion_index.resize(a.frames);
        std::size_t j = 0;
        for (std::size_t k = 0; k < a.frames; ++k) {
            const double center = (static_cast<double>(k) + 0.5) / rate;
            while (j + 1 < frames.size() && std::abs(frames[j + 1].t - center) < std::abs(frames[j].t - center)) ++j;
            a.emotion_index[k] = j;
        }
    }
    return a;
}

EventStream merge_self_stream(const fs::path& dir, std::string_view text, const std::string& file) {
    const fs::path manifest_path = dir / kManifestFile;
    if (!fs::is_regular_file(manifest_path)) {
        throw Error(ErrorCode::MissingManifest, "no manifest.json in " + dir.string());
    }
    const std::string manifest_name(kManifestFile);
    json m;
    double duration = 0.0;
    try {
        m = json::parse(text::read_file(manifest_path));
        duration = m.at("duration_s").get<double>();
        if (!m.at("files").is_object()) throw MalformedStream(manifest_name, 0, "files must be an object");
    } catch (const json::exception& e) {
        throw MalformedStream(manifest_name, 0, e.what());
    }
    auto stream = parse_rating_stream(text, file, duration);
    text::write_file_atomic(dir / kSelfJsonl, serialize_stream(stream));
    m["files"]["self"] = kSelfJsonl;
    text::write_file_atomic(manifest_path, m.dump(2) + "\n");
    return stream;
}

}// namespace mle::store
