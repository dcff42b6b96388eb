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
#include <mle/impact_metrics.hpp>

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mle;
using namespace mle::metrics;

namespace {

store::SampledSeries series_of(std::initializer_list<std::pair<double, int>> runs, double rate = 30.0) {
    store::SampledSeries s;
    s.rate = rate;
    for (const auto& [seconds, v] : runs) {
        s.values.insert(s.values.end(), static_cast<std::size_t>(std::lround(seconds * rate)), v);
    }
    return s;
}

}// namespace

TEST(ImpactScore, AllPositive) {
    const auto s = impact_score(series_of({{360.0, 1}}));
    EXPECT_NEAR(s.value, 360.0, 1e-9);
    EXPECT_NEAR(s.positive_s, 360.0, 1e-9);
    EXPECT_EQ(s.negative_s, 0.0);
}

TEST(ImpactScore, AllNeutral) {
    const auto s = impact_score(series_of({{360.0, 0}}));
    EXPECT_EQ(s.value, 0.0);
    EXPECT_NEAR(s.neutral_s, 360.0, 1e-9);
}

TEST(ImpactScore, MixedRuns) {
    const auto s = impact_score(series_of({{200.0, 1}, {100.0, -1}, {60.0, 0}}));
    EXPECT_NEAR(s.value, 100.0, 1e-9);
    EXPECT_NEAR(s.positive_s, 200.0, 1e-9);
    EXPECT_NEAR(s.negative_s, 100.0, 1e-9);
    EXPECT_NEAR(s.neutral_s, 60.0, 1e-9);
}

TEST(ImpactScore, EmptySeries) {
    EXPECT_THROW(impact_score(store::SampledSeries{}), Error);
}

TEST(ImpactScore, SignedSecondIdentities) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> v(-1, 1);
    std::uniform_int_distribution<int> len(1, 5000);
    for (int k = 0; k < 300; ++k) {
        store::SampledSeries s;
        s.values.resize(static_cast<std::size_t>(len(rng)));
        for (auto& x : s.values) x = v(rng);
        const auto r = impact_score(s);
        const double duration = static_cast<double>(s.values.size()) / s.rate;
        EXPECT_NEAR(r.value, r.positive_s - r.negative_s, 1e-9);
        EXPECT_LE(std::abs(r.value), duration + 1e-9);
        EXPECT_NEAR(r.positive_s + r.neutral_s + r.negative_s, duration, 1e-9);
    }
}

TEST(Survey, InhabiterMean) {
    EXPECT_DOUBLE_EQ(survey_inhabiter(10, 10).value, 10.0);
    EXPECT_DOUBLE_EQ(survey_inhabiter(9, 5).value, 7.0);
    EXPECT_DOUBLE_EQ(survey_inhabiter(1, 10).value, 5.5);
    EXPECT_EQ(survey_inhabiter(1, 10).source, SurveySource::Inhabiter);
}

TEST(Survey, ParticipantItem) {
    EXPECT_DOUBLE_EQ(survey_participant(7).value, 7.0);
    EXPECT_DOUBLE_EQ(survey_participant(1).value, 1.0);
    try {
        survey_participant(10.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
    EXPECT_THROW(survey_inhabiter(0, 5), Error);
}

TEST(Survey, SuccessThresholdInclusive) {
    EXPECT_EQ(classify_success({7.0}), SuccessLabel::Successful);
    EXPECT_EQ(classify_success({6.99}), SuccessLabel::Unsuccessful);
    EXPECT_EQ(classify_success({1.0}), SuccessLabel::Unsuccessful);
    EXPECT_EQ(classify_success({10.0}), SuccessLabel::Successful);
}

TEST(Estimator, Categories) {
    EXPECT_EQ(estimator_category(7, survey_participant(6)), EstimatorClass::Accurate);
    EXPECT_EQ(estimator_category(8, survey_participant(5)), EstimatorClass::OverEstimator);
    EXPECT_EQ(estimator_category(3, survey_participant(2)), EstimatorClass::Excluded);
    EXPECT_EQ(estimator_category(5, survey_participant(9)), EstimatorClass::Excluded);
    EXPECT_EQ(estimator_category(3, survey_participant(6)), EstimatorClass::UnderEstimator);
    // Band edges are inside.
    EXPECT_EQ(estimator_category(2.5, survey_participant(2.5)), EstimatorClass::Accurate);
    EXPECT_EQ(estimator_category(8.5, survey_participant(8.5)), EstimatorClass::Accurate);
}

TEST(SessionMetrics, FromSession) {
    const auto s = fixture::complete_session();
    const auto m = session_metrics(s);
    EXPECT_EQ(m.session_id, "P001_S1");
    EXPECT_EQ(m.participant_id, "P001");
    // Frame 37 is centred exactly on the 1.25 s change, which already counts:
    // 37 positive frames and 23 negative ones at 30 Hz.
    EXPECT_NEAR(m.impact.positive_s, 37.0 / 30.0, 1e-12);
    EXPECT_NEAR(m.impact.negative_s, 23.0 / 30.0, 1e-12);
    EXPECT_DOUBLE_EQ(m.survey_i, 7.5);
    EXPECT_DOUBLE_EQ(m.survey_p, 6.0);
    EXPECT_EQ(m.success, SuccessLabel::Successful);
    ASSERT_TRUE(m.estimator);
    EXPECT_EQ(*m.estimator, EstimatorClass::Accurate);
    ASSERT_TRUE(m.self_impact);
}

TEST(SessionMetrics, UnusableSession) {
    auto s = fixture::complete_session();
    s.survey.reset();
    EXPECT_THROW(session_metrics(s), Error);
}
