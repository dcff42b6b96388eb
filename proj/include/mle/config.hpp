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

#ifndef MLE_CONFIG_HPP
#define MLE_CONFIG_HPP

#include <mle/audio_dsp.hpp>
#include <mle/predictor.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>

namespace mle {

struct Config {
    dsp::DspConfig dsp;
    predict::SvmOptions svm;
    predict::SelectionOptions selection;
    double grid_rate_hz = 30.0;
    int workers = 1;
    std::uint64_t seed = 0;
};

/// Applies a config document. Keys may be nested ({"vad": {"threshold_db":
/// -40}}) or dotted ({"vad.threshold_db": -40}); unknown keys and values of
/// the wrong type raise BadArgument.
void apply_config(Config& cfg, const nlohmann::json& doc);

Config load_config(const std::filesystem::path& path, Config base = {});

/// Resolved configuration with dotted keys in a fixed order.
nlohmann::ordered_json to_json(const Config& cfg);

}// namespace mle

#endif// MLE_CONFIG_HPP
