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

#include <mle/corpus.hpp>
#include <mle/emotion_space.hpp>
#include <mle/error.hpp>

#include <algorithm>
#include <atomic>
#include <functional>
#include <set>
#include <thread>

namespace mle::corpus {

namespace {

// Runs job(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    const auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, 64));
    if (threads == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(run);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}// namespace

std::vector<Entry> load(const std::filesystem::path& root, int workers) {
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) throw Error(ErrorCode::IoFailure, root.string() + " is not a directory");
    std::vector<std::filesystem::path> dirs;
    for (const auto& d : std::filesystem::directory_iterator(root, ec)) {
        if (d.is_directory() && std::filesystem::exists(d.path() / store::kManifestFile)) dirs.push_back(d.path());
    }
    if (ec) throw Error(ErrorCode::IoFailure, "cannot list " + root.string() + ": " + ec.message());
    std::sort(dirs.begin(), dirs.end());

    std::vector<Entry> entries(dirs.size());
    parallel_for(dirs.size(), workers, [&](std::size_t i) {
        Entry& e = entries[i];
        e.path = dirs[i];
        e.session_id = dirs[i].filename().string();
        try {
            e.session = store::ingest_bundle(dirs[i]);
            e.session_id = e.session->session_id;
            const auto rep = store::validate_session(*e.session);
            e.issues = rep.issues;
            e.usable = rep.usable;
        } catch (const Error& err) {
            e.issues.push_back({store::Severity::Fatal, std::string(to_string(err.code())), err.what()});
            e.usable = false;
        }
    });

    std::set<std::string> seen;
    for (auto& e : entries) {
        if (!e.session) continue;
        if (!seen.insert(e.session_id).second) {
            e.issues.push_back({store::Severity::Fatal, "DuplicateSessionId", "session id " + e.session_id + " already used"});
            e.usable = false;
        }
    }
    return entries;
}

std::optional<FeatureMode> parse_feature_mode(std::string_view s) {
    if (s == "full") return FeatureMode::Full;
    if (s == "audio_only") return FeatureMode::AudioOnly;
    if (s == "video_only") return FeatureMode::VideoOnly;
    return std::nullopt;
}

std::vector<std::string> feature_columns(FeatureMode mode) {
    std::vector<std::string> cols;
    if (mode != FeatureMode::VideoOnly) {
        for (const auto& f : dsp::feature_registry()) cols.emplace_back(f.name);
    }
    if (mode != FeatureMode::AudioOnly) {
        const auto& v = emotion::video_feature_names();
        cols.insert(cols.end(), v.begin(), v.end());
    }
    return cols;
}

std::vector<std::optional<double>> session_features(const store::Session& s, FeatureMode mode, const Config& cfg) {
    std::vector<std::optional<double>> row;
    if (mode != FeatureMode::VideoOnly) {
        dsp::FeatureVector fv;
        if (s.participant_audio) fv = dsp::audio_feature_vector(*s.participant_audio, cfg.dsp);
        row.insert(row.end(), fv.values.begin(), fv.values.end());
    }
    if (mode != FeatureMode::AudioOnly) {
        if (s.emotion_frames && !s.emotion_frames->empty()) {
            const auto v = emotion::video_features(*s.emotion_frames);
            row.insert(row.end(), v.begin(), v.end());
        } else {
            row.resize(row.size() + emotion::video_feature_names().size());
        }
    }
    return row;
}

predict::FeatureTable feature_table(const std::vector<Entry>& entries, FeatureMode mode, const Config& cfg, int workers) {
    std::vector<const Entry*> usable;
    for (const auto& e : entries) {
        if (e.usable && e.session) usable.push_back(&e);
    }
    predict::FeatureTable t;
    t.feature_names = feature_columns(mode);
    t.session_ids.resize(usable.size());
    t.values.resize(usable.size());
    parallel_for(usable.size(), workers, [&](std::size_t i) {
        t.session_ids[i] = usable[i]->session_id;
        t.values[i] = session_features(*usable[i]->session, mode, cfg);
    });
    return t;
}

std::map<std::string, metrics::SuccessLabel> success_labels(const std::vector<Entry>& entries) {
    std::map<std::string, metrics::SuccessLabel> out;
    for (const auto& e : entries) {
        if (!e.usable || !e.session || !e.session->survey) continue;
        const auto& sv = *e.session->survey;
        out.emplace(e.session_id, metrics::classify_success(metrics::survey_inhabiter(sv.survey_i_item1, sv.survey_i_item2)));
    }
    return out;
}

}// namespace mle::corpus
