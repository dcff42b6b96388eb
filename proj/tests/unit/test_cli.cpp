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
#include <mle/session_store.hpp>
#include <mle/text_util.hpp>

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <sys/wait.h>

using namespace mle;
namespace fs = std::filesystem;

namespace {

const std::string kMle = MLE_CLI_PATH;

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

Run run(const fixture::TempDir& scratch, const std::string& args) {
    const auto out = scratch / "stdout.txt";
    const auto err = scratch / "stderr.txt";
    const std::string cmd = quote(kMle) + " " + args + " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = text::read_file(out);
    r.err = text::read_file(err);
    return r;
}

// Replays arrow and page keys the way the annotation tool records them:
// arrows step a saturating three-state chain, page keys append markers, and
// a later press within the same millisecond replaces the earlier one.
struct KeyExport {
    std::string self;
    std::string eoi;
};

KeyExport replay_keys(const std::vector<std::pair<double, char>>& keys) {
    using store::ImpactValue;
    store::EventStream self, eoi;
    int state = 0;
    const auto push = [](store::EventStream& s, double t, ImpactValue v) {
        const double ms = std::floor(t * 1000.0) / 1000.0;
        if (!s.events.empty() && s.events.back().t == ms) {
            s.events.back().value = v;
        } else {
            s.events.push_back({ms, v});
        }
    };
    for (const auto& [t, key] : keys) {
        if (key == 'U' || key == 'D') {
            const int next = std::clamp(state + (key == 'U' ? 1 : -1), -1, 1);
            if (next == state) continue;
            state = next;
            push(self, t, next > 0 ? ImpactValue::Positive : (next < 0 ? ImpactValue::Negative : ImpactValue::Neutral));
        } else if (key == 'P' || key == 'N') {
            push(eoi, t, key == 'P' ? ImpactValue::EoiPositive : ImpactValue::EoiNegative);
        }
    }
    return {store::serialize_stream(self), store::serialize_stream(eoi)};
}

void make_corpus(const fs::path& root, int n) {
    for (int k = 0; k < n; ++k) {
        const std::string id = "P00" + std::to_string(k + 1) + "_S1";
        auto s = fixture::complete_session(id);
        s.survey->survey_i_item1 = k % 2 == 0 ? 8.0 : 3.0;
        s.survey->survey_i_item2 = k % 2 == 0 ? 7.0 : 2.0;
        s.participant_audio = synth::sine(k % 2 == 0 ? 220.0 : 180.0, 2.0, 16000, 0.3);
        store::write_bundle(s, root / id);
    }
}

// Speech-like bundles whose audio yields every feature.
void make_speech_corpus(const fs::path& root) {
    synth::SessionCohortSpec spec;
    spec.participants = 2;
    spec.positives = 4;
    spec.speech_s = 2.0;
    for (const auto& s : synth::make_session_cohort(spec)) store::write_bundle(s, root / s.session_id);
}

}// namespace

TEST(Cli, ValidateReportsBrokenBundle) {
    fixture::TempDir scratch, root;
    make_corpus(root.path(), 3);
    text::write_file_atomic(root / "P002_S1" / "impact.jsonl", "{\"t\":1,\"v\":\"positive\"}\n{\"t\":0.5,\"v\":\"neutral\"}\n");
    const auto r = run(scratch, "validate --root " + quote(root.path().string()));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["usable"], 2);
    EXPECT_EQ(doc["unusable"], 1);
}

TEST(Cli, AudioOnlyFeaturesUseRegistryColumns) {
    fixture::TempDir scratch, root;
    make_corpus(root.path(), 2);
    const auto r = run(scratch, "features --mode audio_only --root " + quote(root.path().string()));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto header = text::split(r.out.substr(0, r.out.find('\n')), ',');
    ASSERT_EQ(header.size(), dsp::kAudioFeatureCount + 1);
    EXPECT_EQ(header[0], "session_id");
    for (std::size_t i = 0; i < dsp::kAudioFeatureCount; ++i) EXPECT_EQ(header[i + 1], dsp::feature_registry()[i].name);
}

TEST(Cli, MergeRejectsNonMonotonicExport) {
    fixture::TempDir scratch, root;
    make_corpus(root.path(), 1);
    const auto bundle = root / "P001_S1";
    const auto manifest = text::read_file(bundle / "manifest.json");
    const auto self = text::read_file(bundle / "self.jsonl");
    text::write_file_atomic(scratch / "bad.jsonl", "{\"t\":1.5,\"v\":\"positive\"}\n{\"t\":0.5,\"v\":\"negative\"}\n");
    const auto r = run(scratch, "merge-annotations --root " + quote(root.path().string()) + " --annotation P001_S1=" +
                                    quote((scratch / "bad.jsonl").string()));
    EXPECT_EQ(r.status, 2);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "NonMonotonicTimestamps");
    EXPECT_EQ(text::read_file(bundle / "manifest.json"), manifest);
    EXPECT_EQ(text::read_file(bundle / "self.jsonl"), self);
}

TEST(Cli, KeyboardExportRoundTrip) {
    const std::vector<std::vector<std::pair<double, char>>> scripts{
        {{0.10, 'U'}, {0.40, 'U'}, {0.70, 'D'}, {0.9, 'P'}, {1.20, 'D'}, {1.21, 'D'}},
        {{0.0, 'D'}, {0.5000, 'U'}, {0.5004, 'U'}, {1.0, 'N'}, {1.9, 'D'}},
        {{0.3, 'x'}, {0.6, 'U'}, {1.1, 'D'}, {1.1002, 'U'}},
    };
    for (std::size_t k = 0; k < scripts.size(); ++k) {
        fixture::TempDir scratch, root;
        make_corpus(root.path(), 1);
        const auto exported = replay_keys(scripts[k]);
        text::write_file_atomic(scratch / "self.jsonl", exported.self);
        const auto r = run(scratch, "merge-annotations --root " + quote(root.path().string()) +
                                        " --annotation P001_S1=" + quote((scratch / "self.jsonl").string()));
        ASSERT_EQ(r.status, 0) << k << r.err;
        const auto doc = nlohmann::json::parse(r.out);
        ASSERT_EQ(doc["merged"].size(), 1u);
        EXPECT_TRUE(doc["merged"][0]["usable"].get<bool>());
        EXPECT_TRUE(doc["merged"][0]["issues"].empty()) << doc.dump();
        EXPECT_EQ(text::read_file(root / "P001_S1" / "self.jsonl"), exported.self);
        // The marker stream is accepted by the bundle reader as well.
        EXPECT_NO_THROW(store::parse_eoi_stream(exported.eoi, "eoi.jsonl", 2.0));
    }
}

TEST(Cli, SubcommandsAreDeterministic) {
    fixture::TempDir scratch, root;
    make_speech_corpus(root.path());
    const std::string r = quote(root.path().string());
    const auto feats = scratch / "f.csv";
    const auto labels = scratch / "l.csv";
    ASSERT_EQ(run(scratch, "features --root " + r + " --out " + quote(feats.string()) + " --labels-out " +
                               quote(labels.string()))
                  .status,
              0);
    const std::string fl = " --features " + quote(feats.string()) + " --labels " + quote(labels.string());
    for (const std::string& args :
         {"ingest --root " + r, "validate --root " + r, "features --root " + r, "features --mode video_only --root " + r,
          "train" + fl, "evaluate --mode full --mode top_selected" + fl}) {
        const auto a = run(scratch, args);
        const auto b = run(scratch, args);
        ASSERT_EQ(a.status, 0) << args << a.err;
        EXPECT_EQ(a.out, b.out) << args;
    }
    ASSERT_EQ(run(scratch, "report --root " + r + " --out-dir " + quote((scratch / "ra").string())).status, 0);
    ASSERT_EQ(run(scratch, "report --root " + r + " --out-dir " + quote((scratch / "rb").string())).status, 0);
    for (const auto& e : fs::recursive_directory_iterator(scratch / "ra")) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), scratch / "ra");
        EXPECT_EQ(text::read_file(e.path()), text::read_file(scratch / "rb" / rel)) << rel;
    }
}

TEST(Cli, ExitCodes) {
    fixture::TempDir scratch;
    EXPECT_EQ(run(scratch, "validate --root " + quote((scratch / "absent").string())).status, 3);
    EXPECT_EQ(run(scratch, "validate").status, 4);
    EXPECT_EQ(run(scratch, "frobnicate").status, 4);
    EXPECT_EQ(run(scratch, "train --features a --labels b --C -1").status, 4);
    fixture::TempDir empty;
    const auto r = run(scratch, "validate --root " + quote(empty.path().string()));
    EXPECT_EQ(r.status, 2);
    EXPECT_TRUE(nlohmann::json::parse(r.err).contains("error"));
}

TEST(Cli, EvaluateWritesRocFiles) {
    fixture::TempDir scratch, root;
    make_speech_corpus(root.path());
    const auto feats = scratch / "f.csv";
    const auto labels = scratch / "l.csv";
    ASSERT_EQ(run(scratch, "features --root " + quote(root.path().string()) + " --out " + quote(feats.string()) +
                               " --labels-out " + quote(labels.string()))
                  .status,
              0);
    const auto r = run(scratch, "evaluate --mode full --mode audio_only --timing --features " + quote(feats.string()) +
                                    " --labels " + quote(labels.string()) + " --roc-dir " +
                                    quote((scratch / "roc").string()));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    for (const auto& m : doc["modes"]) {
        EXPECT_TRUE(m.contains("prep_seconds"));
        const auto csv = text::read_file(scratch / "roc" / ("roc_" + m["mode"].get<std::string>() + ".csv"));
        const auto lines = text::split(csv, '\n');
        // Header, one line per point, and the empty tail after the last newline.
        EXPECT_EQ(lines.size(), m["roc"].size() + 2);
        EXPECT_EQ(lines[0], "fpr,tpr");
    }
}

TEST(Cli, EmptyCohortReportHasEmptySections) {
    fixture::TempDir scratch, root;
    const auto r = run(scratch, "report --root " + quote(root.path().string()) + " --out-dir " +
                                    quote((scratch / "rep").string()));
    EXPECT_EQ(r.status, 2);
    const auto doc = nlohmann::json::parse(text::read_file(scratch / "rep" / "report.json"));
    EXPECT_EQ(doc["sessions"], 0);
    EXPECT_TRUE(doc["group_means"].is_null());
    EXPECT_TRUE(doc["transitions"].is_null());
    EXPECT_TRUE(doc["estimator_breakdown"]["categories"].empty());
}
