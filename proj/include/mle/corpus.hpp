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

#ifndef MLE_CORPUS_HPP
#define MLE_CORPUS_HPP

#include <mle/config.hpp>
#include <mle/predictor.hpp>
#include <mle/session_store.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mle::corpus {

struct Entry {
    std::string session_id;// directory name when the bundle cannot be read
    std::filesystem::path path;
    bool usable = false;
    std::vector<store::Issue> issues;
    std::optional<store::Session> session;
};

/// One bundle directory per session directly under `root`, found by the
/// presence of manifest.json and visited in path order. Bundles that fail to
/// parse are kept as unusable entries; a repeated session id makes the later
/// bundle unusable. Raises IoFailure if `root` is not a directory.
std::vector<Entry> load(const std::filesystem::path& root, int workers = 1);

enum class FeatureMode { Full, AudioOnly, VideoOnly };

std::optional<FeatureMode> parse_feature_mode(std::string_view s);

std::vector<std::string> feature_columns(FeatureMode mode);

/// Features of one session; absent streams give absent values.
std::vector<std::optional<double>> session_features(const store::Session& s, FeatureMode mode, const Config& cfg);

/// Feature table over the usable entries, in entry order.
predict::FeatureTable feature_table(const std::vector<Entry>& entries, FeatureMode mode, const Config& cfg,
                                    int workers = 1);

/// Success labels from the inhabiter survey of every usable entry.
std::map<std::string, metrics::SuccessLabel> success_labels(const std::vector<Entry>& entries);

}// namespace mle::corpus

#endif// MLE_CORPUS_HPP
