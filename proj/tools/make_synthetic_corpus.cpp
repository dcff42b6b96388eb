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

// Writes a synthetic corpus of session bundles, or the 53-column feature
// cohort used for the selection check.

#include <mle/error.hpp>
#include <mle/predictor.hpp>
#include <mle/session_store.hpp>
#include <mle/synth.hpp>
#include <mle/text_util.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace mle;

int main(int argc, char** argv) {
    CLI::App app{"Synthetic session corpus generator."};
    synth::SessionCohortSpec spec;
    synth::FeatureCohortSpec fspec;
    std::string out, table_out, labels_out;
    std::uint64_t seed = 1;

    app.add_option("--out", out, "corpus root to create");
    app.add_option("--seed", seed, "generator seed")->capture_default_str();
    app.add_option("--participants", spec.participants, "participants, four sessions each")->capture_default_str();
    app.add_option("--positives", spec.positives, "successful sessions")->capture_default_str();
    app.add_option("--signal", spec.signal, "strength of the planted audio signal")->capture_default_str();
    app.add_option("--speech-s", spec.speech_s, "approximate speech per session in seconds")->capture_default_str();
    app.add_option("--rate", spec.rate, "audio sample rate")->capture_default_str();
    app.add_option("--feature-table", table_out, "write the 53-column feature cohort CSV instead");
    app.add_option("--labels-out", labels_out, "labels CSV for --feature-table");
    CLI11_PARSE(app, argc, argv);

    try {
        if (!table_out.empty()) {
            fspec.seed = seed;
            const auto c = synth::make_feature_cohort(fspec);
            predict::FeatureTable t;
            t.feature_names = c.data.feature_names;
            std::map<std::string, metrics::SuccessLabel> labels;
            for (const auto& r : c.data.rows) {
                t.session_ids.push_back(r.session_id);
                t.values.emplace_back(r.x.begin(), r.x.end());
                labels.emplace(r.session_id, r.y);
            }
            text::write_file_atomic(table_out, predict::format_feature_table(t));
            if (!labels_out.empty()) text::write_file_atomic(labels_out, predict::format_labels(labels));
            return 0;
        }
        if (out.empty()) throw Error(ErrorCode::BadArgument, "--out or --feature-table is required");
        spec.seed = seed;
        for (const auto& s : synth::make_session_cohort(spec)) store::write_bundle(s, std::filesystem::path(out) / s.session_id);
    } catch (const Error& e) {
        std::cerr << "{\"error\":\"" << to_string(e.code()) << "\",\"message\":\"" << e.what() << "\"}\n";
        return e.code() == ErrorCode::BadArgument ? 4 : 3;
    }
    return 0;
}
