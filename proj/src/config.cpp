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

#include <mle/config.hpp>
#include <mle/error.hpp>
#include <mle/text_util.hpp>

#include <functional>
#include <map>

namespace mle {

namespace {

using Setter = std::function<void(Config&, const nlohmann::json&, const std::string&)>;

double number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw Error(ErrorCode::BadArgument, "config key " + key + " must be a number");
    return v.get<double>();
}

Setter real(double dsp::DspConfig::*field) {
    return [field](Config& c, const nlohmann::json& v, const std::string& k) { c.dsp.*field = number(v, k); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"vad.threshold_db", real(&dsp::DspConfig::vad_threshold_db)},
        {"vad.hangover_ms", real(&dsp::DspConfig::vad_hangover_ms)},
        {"pitch.floor_hz", real(&dsp::DspConfig::pitch_floor_hz)},
        {"pitch.ceiling_hz", real(&dsp::DspConfig::pitch_ceiling_hz)},
        {"pause.min_s", real(&dsp::DspConfig::pause_min_s)},
        {"syllable.dip_db", real(&dsp::DspConfig::syllable_dip_db)},
        {"highpass.cutoff_hz", real(&dsp::DspConfig::highpass_cutoff_hz)},
        {"silence.min_gap_s", real(&dsp::DspConfig::silence_min_gap_s)},
        {"svm.C", [](Config& c, const nlohmann::json& v, const std::string& k) { c.svm.C = number(v, k); }},
        {"selection.top_k",
         [](Config& c, const nlohmann::json& v, const std::string& k) {
             if (!v.is_number_unsigned()) throw Error(ErrorCode::BadArgument, "config key " + k + " must be a non-negative integer");
             c.selection.top_k = v.get<std::size_t>();
         }},
        {"selection.corr_max", [](Config& c, const nlohmann::json& v, const std::string& k) { c.selection.corr_max = number(v, k); }},
        {"grid.rate_hz", [](Config& c, const nlohmann::json& v, const std::string& k) { c.grid_rate_hz = number(v, k); }},
    };
    return table;
}

void apply_flat(Config& cfg, const nlohmann::json& doc, const std::string& prefix) {
    for (const auto& [key, value] : doc.items()) {
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            apply_flat(cfg, value, full);
            continue;
        }
        const auto it = setters().find(full);
        if (it == setters().end()) throw Error(ErrorCode::BadArgument, "unknown config key " + full);
        it->second(cfg, value, full);
    }
}

}// namespace

void apply_config(Config& cfg, const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::BadArgument, "config must be a JSON object");
    apply_flat(cfg, doc, "");
    if (!(cfg.dsp.pitch_floor_hz > 0.0 && cfg.dsp.pitch_floor_hz < cfg.dsp.pitch_ceiling_hz)) {
        throw Error(ErrorCode::BadArgument, "pitch.floor_hz must be positive and below pitch.ceiling_hz");
    }
    if (!(cfg.svm.C > 0.0)) throw Error(ErrorCode::BadArgument, "svm.C must be positive");
    if (!(cfg.grid_rate_hz > 0.0)) throw Error(ErrorCode::BadArgument, "grid.rate_hz must be positive");
}

Config load_config(const std::filesystem::path& path, Config base) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::BadArgument, "config " + path.string() + ": " + e.what());
    }
    apply_config(base, doc);
    return base;
}

nlohmann::ordered_json to_json(const Config& cfg) {
    nlohmann::ordered_json j;
    j["vad.threshold_db"] = cfg.dsp.vad_threshold_db;
    j["vad.hangover_ms"] = cfg.dsp.vad_hangover_ms;
    j["pitch.floor_hz"] = cfg.dsp.pitch_floor_hz;
    j["pitch.ceiling_hz"] = cfg.dsp.pitch_ceiling_hz;
    j["pause.min_s"] = cfg.dsp.pause_min_s;
    j["syllable.dip_db"] = cfg.dsp.syllable_dip_db;
    j["highpass.cutoff_hz"] = cfg.dsp.highpass_cutoff_hz;
    j["silence.min_gap_s"] = cfg.dsp.silence_min_gap_s;
    j["svm.C"] = cfg.svm.C;
    j["selection.top_k"] = cfg.selection.top_k;
    j["selection.corr_max"] = cfg.selection.corr_max;
    j["grid.rate_hz"] = cfg.grid_rate_hz;
    return j;
}

}// namespace mle
