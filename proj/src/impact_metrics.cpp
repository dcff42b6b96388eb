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
#include <mle/text_util.hpp>

#include <cmath>
#include <cstdint>

namespace mle::metrics {

namespace {

void check_likert(double v, const char* what) {
    if (!(v >= 1.0 && v <= 10.0)) {
        throw Error(ErrorCode::OutOfRange, std::string(what) + " " + text::format_double(v) + " outside 1..10");
    }
}

}// namespace

ImpactScore impact_score(const store::SampledSeries& series) {
    if (series.values.empty()) throw Error(ErrorCode::EmptySeries, "IMPACT series is empty");
    // Count frames as integers so value == positive_s - negative_s exactly.
    std::int64_t pos = 0;
    std::int64_t neu = 0;
    std::int64_t neg = 0;
    for (int v : series.values) {
        if (v > 0) {
            ++pos;
        } else if (v < 0) {
            ++neg;
        } else {
            ++neu;
        }
    }
    ImpactScore s;
    s.positive_s = static_cast<double>(pos) / series.rate;
    s.neutral_s = static_cast<double>(neu) / series.rate;
    s.negative_s = static_cast<double>(neg) / series.rate;
    s.value = s.positive_s - s.negative_s;
    return s;
}

SurveyScore survey_inhabiter(double item1, double item2) {
    check_likert(item1, "SURVEY-I item 1");
    check_likert(item2, "SURVEY-I item 2");
    return {(item1 + item2) / 2.0, SurveySource::Inhabiter};
}

SurveyScore survey_participant(double item) {
    check_likert(item, "SURVEY-P item");
    return {item, SurveySource::Participant};
}

SuccessLabel classify_success(const SurveyScore& score) {
    return score.value >= kSuccessThreshold ? SuccessLabel::Successful : SuccessLabel::Unsuccessful;
}

EstimatorClass estimator_category(double self_estimate, const SurveyScore& inhabiter) {
    check_likert(self_estimate, "self estimate");
    if (inhabiter.value < kEstimatorFloor || inhabiter.value > kEstimatorCeiling) return EstimatorClass::Excluded;
    const double gap = self_estimate - inhabiter.value;
    if (std::abs(gap) <= kAccurateGap) return EstimatorClass::Accurate;
    return gap > 0.0 ? EstimatorClass::OverEstimator : EstimatorClass::UnderEstimator;
}

std::string_view to_string(SuccessLabel label) {
    return label == SuccessLabel::Successful ? "successful" : "unsuccessful";
}

std::string_view to_string(EstimatorClass c) {
    switch (c) {
        case EstimatorClass::Accurate: return "accurate";
        case EstimatorClass::OverEstimator: return "over_estimator";
        case EstimatorClass::UnderEstimator: return "under_estimator";
        case EstimatorClass::Excluded: return "excluded";
    }
    return "?";
}

SessionMetrics session_metrics(const store::Session& session, double rate) {
    if (!session.impact_events || !session.survey) {
        throw Error(ErrorCode::UnusableSession, "session " + session.session_id + " lacks IMPACT or survey data");
    }
    SessionMetrics m;
    m.session_id = session.session_id;
    m.participant_id = session.participant_id;
    m.scenario_id = session.scenario_id;
    m.impact = impact_score(store::resample_events(*session.impact_events, session.duration, rate));
    const SurveyScore inhabiter = survey_inhabiter(session.survey->survey_i_item1, session.survey->survey_i_item2);
    m.survey_i = inhabiter.value;
    m.survey_p = survey_participant(session.survey->survey_p).value;
    m.success = classify_success(inhabiter);
    if (session.survey->self_estimate) m.estimator = estimator_category(*session.survey->self_estimate, inhabiter);
    if (session.self_events) {
        m.self_impact = impact_score(store::resample_events(*session.self_events, session.duration, rate));
    }
    return m;
}

}// namespace mle::metrics
