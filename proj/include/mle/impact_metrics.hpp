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

#ifndef MLE_IMPACT_METRICS_HPP
#define MLE_IMPACT_METRICS_HPP

#include <mle/session_store.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace mle::metrics {

/// Net positive seconds: sum of valence times frame length.
struct ImpactScore {
    double value = 0.0;
    double positive_s = 0.0;
    double neutral_s = 0.0;
    double negative_s = 0.0;
};

enum class SurveySource { Inhabiter, Participant };

struct SurveyScore {
    double value = 0.0;
    SurveySource source = SurveySource::Inhabiter;
};

enum class SuccessLabel { Successful, Unsuccessful };

enum class EstimatorClass { Accurate, OverEstimator, UnderEstimator, Excluded };

inline constexpr double kSuccessThreshold = 7.0;
inline constexpr double kEstimatorFloor = 2.5;
inline constexpr double kEstimatorCeiling = 8.5;
inline constexpr double kAccurateGap = 1.0;

ImpactScore impact_score(const store::SampledSeries& series);

SurveyScore survey_inhabiter(double item1, double item2);
SurveyScore survey_participant(double item);

SuccessLabel classify_success(const SurveyScore& score);

/// Agreement between a participant's self estimate and the inhabiter's
/// score. Inhabiter scores below 2.5 or above 8.5 are Excluded (floor /
/// ceiling); otherwise a gap of at most one point is Accurate.
EstimatorClass estimator_category(double self_estimate, const SurveyScore& inhabiter);

std::string_view to_string(SuccessLabel label);
std::string_view to_string(EstimatorClass c);

/// Per-session record written by the report command.
struct SessionMetrics {
    std::string session_id;
    std::string participant_id;
    int scenario_id = 0;
    ImpactScore impact;
    double survey_i = 0.0;
    double survey_p = 0.0;
    SuccessLabel success = SuccessLabel::Unsuccessful;
    std::optional<EstimatorClass> estimator;
    std::optional<ImpactScore> self_impact;
};

/// Requires a usable session (impact stream and survey present).
SessionMetrics session_metrics(const store::Session& session, double rate = store::kDefaultRate);

}// namespace mle::metrics

#endif// MLE_IMPACT_METRICS_HPP
