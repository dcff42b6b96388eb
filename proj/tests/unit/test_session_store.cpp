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

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <functional>
#include <random>

using namespace mle;
using namespace mle::store;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::BadArgument;
}

bool has_issue(const ValidationReport& r, const std::string& code, Severity sev) {
    return std::any_of(r.issues.begin(), r.issues.end(),
                       [&](const Issue& i) { return i.code == code && i.severity == sev; });
}

}// namespace

TEST(SessionStore, ValenceOfOrdinalLevels) {
    EXPECT_EQ(valence(ImpactValue::Positive), 1);
    EXPECT_EQ(valence(ImpactValue::Neutral), 0);
    EXPECT_EQ(valence(ImpactValue::Negative), -1);
    EXPECT_EQ(code_of([] { valence(ImpactValue::EoiPositive); }), ErrorCode::OutOfRange);
    EXPECT_EQ(eoi_code(ImpactValue::EoiPositive), 4);
    EXPECT_EQ(eoi_code(ImpactValue::EoiNegative), 5);
}

TEST(SessionStore, IngestCompleteBundle) {
    fixture::TempDir dir;
    write_bundle(fixture::complete_session(), dir.path());
    const auto s = ingest_bundle(dir.path());
    EXPECT_EQ(s.session_id, "P001_S1");
    EXPECT_TRUE(s.participant_audio && s.inhabiter_audio && s.emotion_frames && s.impact_events && s.eoi_events &&
                s.self_events && s.survey);
    EXPECT_EQ(s.impact_events->events.size(), 2u);
    EXPECT_EQ(s.emotion_frames->size(), 10u);
    const auto rep = validate_session(s);
    EXPECT_TRUE(rep.usable);
    EXPECT_TRUE(rep.issues.empty());
}

TEST(SessionStore, RoundTripIsStable) {
    fixture::TempDir a, b;
    write_bundle(fixture::complete_session(), a.path());
    const auto first = ingest_bundle(a.path());
    write_bundle(first, b.path());
    EXPECT_EQ(ingest_bundle(b.path()), first);
}

TEST(SessionStore, LowSampleRateRejected) {
    fixture::TempDir dir;
    write_bundle(fixture::complete_session(), dir.path());
    auto m = nlohmann::json::parse(text::read_file(dir / "manifest.json"));
    m["sample_rates"]["participant_audio_hz"] = 8000;
    text::write_file_atomic(dir / "manifest.json", m.dump());
    EXPECT_EQ(code_of([&] { ingest_bundle(dir.path()); }), ErrorCode::RateOutOfRange);
}

TEST(SessionStore, DecreasingTimestampsRejected) {
    const std::string text = "{\"t\":1.5,\"v\":\"positive\"}\n{\"t\":1.0,\"v\":\"negative\"}\n";
    EXPECT_EQ(code_of([&] { parse_rating_stream(text, "impact.jsonl"); }), ErrorCode::NonMonotonicTimestamps);
    fixture::TempDir dir;
    write_bundle(fixture::complete_session(), dir.path());
    text::write_file_atomic(dir / "impact.jsonl", text);
    EXPECT_EQ(code_of([&] { ingest_bundle(dir.path()); }), ErrorCode::NonMonotonicTimestamps);
}

TEST(SessionStore, MalformedLineReportsPosition) {
    try {
        parse_rating_stream("{\"t\":0.0,\"v\":\"positive\"}\n{\"t\":1.0,\"v\":\"great\"}\n", "self.jsonl");
        FAIL();
    } catch (const MalformedStream& e) {
        EXPECT_EQ(e.file(), "self.jsonl");
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(SessionStore, MissingManifest) {
    fixture::TempDir dir;
    EXPECT_EQ(code_of([&] { ingest_bundle(dir.path()); }), ErrorCode::MissingManifest);
}

TEST(SessionStore, MissingSurveyIsFatal) {
    auto s = fixture::complete_session();
    s.survey.reset();
    const auto rep = validate_session(s);
    EXPECT_FALSE(rep.usable);
    EXPECT_TRUE(has_issue(rep, "missing_survey", Severity::Fatal));
}

TEST(SessionStore, DurationWithinTolerance) {
    auto s = fixture::complete_session();
    s.duration = 360.0;
    s.participant_audio = synth::silence(359.5, 16000);
    EXPECT_TRUE(validate_session(s).issues.empty());
    s.participant_audio = synth::silence(357.0, 16000);
    EXPECT_TRUE(has_issue(validate_session(s), "duration_mismatch", Severity::Fatal));
}

TEST(SessionStore, MissingSelfOnlyWarns) {
    auto s = fixture::complete_session();
    s.self_events.reset();
    const auto rep = validate_session(s);
    EXPECT_TRUE(rep.usable);
    ASSERT_EQ(rep.issues.size(), 1u);
    EXPECT_TRUE(has_issue(rep, "missing_self", Severity::Warning));
}

TEST(SessionStore, ResampleConstantHold) {
    const auto s = resample_events(EventStream{{{0.0, ImpactValue::Positive}}}, 1.0, 30.0);
    EXPECT_EQ(s.values, std::vector<int>(30, 1));
}

TEST(SessionStore, ResampleHalfAndHalf) {
    const auto s = resample_events(EventStream{{{0.0, ImpactValue::Positive}, {0.5, ImpactValue::Negative}}}, 1.0, 30.0);
    std::vector<int> expected(15, 1);
    expected.resize(30, -1);
    EXPECT_EQ(s.values, expected);
}

TEST(SessionStore, ResampleEmptyIsNeutral) {
    EXPECT_EQ(resample_events(EventStream{}, 1.0, 30.0).values, std::vector<int>(30, 0));
}

TEST(SessionStore, MarkersDoNotMoveState) {
    const EventStream e{{{0.0, ImpactValue::Negative}, {0.4, ImpactValue::EoiPositive}, {0.6, ImpactValue::EoiNegative}}};
    EXPECT_EQ(resample_events(e, 1.0, 30.0).values, std::vector<int>(30, -1));
}

TEST(SessionStore, ResampleMatchesBruteForce) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const double dur = std::uniform_real_distribution<double>(0.5, 30.0)(rng);
        const auto e = oracle::random_stream(rng, dur, 25);
        EXPECT_EQ(resample_events(e, dur, 30.0).values, oracle::zoh(e, dur, 30.0));
    }
}

TEST(SessionStore, ResampleIdempotent) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const double dur = std::uniform_real_distribution<double>(0.5, 20.0)(rng);
        const auto first = resample_events(oracle::random_stream(rng, dur, 20), dur, 30.0);
        EXPECT_EQ(resample_events(series_to_events(first), dur, 30.0), first);
    }
}

TEST(SessionStore, AlignSharesOneGrid) {
    auto s = fixture::complete_session();
    s.self_events = EventStream{{{0.1, ImpactValue::Negative}, {0.3, ImpactValue::Positive}, {1.9, ImpactValue::Neutral}}};
    const auto a = align_streams(s, 30.0);
    EXPECT_EQ(a.frames, 60u);
    EXPECT_EQ(a.impact.values.size(), a.frames);
    ASSERT_TRUE(a.self);
    EXPECT_EQ(a.self->values.size(), a.frames);
    EXPECT_EQ(a.eoi_markers.size(), a.frames);
    EXPECT_EQ(a.emotion_index.size(), a.frames);

    const auto half = align_streams(s, 15.0);
    EXPECT_LE(std::abs(static_cast<long>(half.frames) - static_cast<long>(a.frames / 2)), 1);
}

TEST(SessionStore, AlignRequiresUsableSession) {
    auto s = fixture::complete_session();
    s.impact_events.reset();
    EXPECT_EQ(code_of([&] { align_streams(s); }), ErrorCode::UnusableSession);
}

TEST(SessionStore, MergeSelfStreamInstallsFile) {
    fixture::TempDir dir;
    auto s = fixture::complete_session();
    s.self_events.reset();
    write_bundle(s, dir.path());
    const auto merged = merge_self_stream(dir.path(), "{\"t\":0.5,\"v\":\"negative\"}\n", "export.jsonl");
    EXPECT_EQ(merged.events.size(), 1u);
    const auto back = ingest_bundle(dir.path());
    ASSERT_TRUE(back.self_events);
    EXPECT_EQ(*back.self_events, merged);
    EXPECT_TRUE(validate_session(back).issues.empty());
}

TEST(SessionStore, MergeRejectsAndLeavesBundleAlone) {
    fixture::TempDir dir;
    write_bundle(fixture::complete_session(), dir.path());
    const auto manifest = text::read_file(dir / "manifest.json");
    const auto self = text::read_file(dir / "self.jsonl");
    EXPECT_EQ(code_of([&] {
                  merge_self_stream(dir.path(), "{\"t\":1.0,\"v\":\"positive\"}\n{\"t\":0.2,\"v\":\"neutral\"}\n", "x");
              }),
              ErrorCode::NonMonotonicTimestamps);
    // Past the manifest duration.
    EXPECT_THROW(merge_self_stream(dir.path(), "{\"t\":9.0,\"v\":\"positive\"}\n", "x"), MalformedStream);
    EXPECT_EQ(text::read_file(dir / "manifest.json"), manifest);
    EXPECT_EQ(text::read_file(dir / "self.jsonl"), self);
}
