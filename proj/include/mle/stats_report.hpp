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

#ifndef MLE_STATS_REPORT_HPP
#define MLE_STATS_REPORT_HPP

#include <mle/emotion_space.hpp>
#include <mle/impact_metrics.hpp>

#include <json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mle::stats {

using metrics::SessionMetrics;

struct CorrelationResult {
    double r = 0.0;
    std::size_t n = 0;
    double p_two_sided = 1.0;
};

/// Sample Pearson correlation with a two-sided t test on n - 2 degrees of
/// freedom; |r| = 1 gives p = 0.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Rows: scenario-1 status (successful, unsuccessful); columns: scenario-4
/// status in the same order.
struct Table2x2 {
    long a = 0;// successful -> successful
    long b = 0;// successful -> unsuccessful
    long c = 0;// unsuccessful -> successful
    long d = 0;// unsuccessful -> unsuccessful

    long total() const { return a + b + c + d; }
    bool operator==(const Table2x2&) const = default;
};

struct ChiSquareResult {
    double chi2 = 0.0;
    double p = 1.0;
    long n = 0;
};

/// Pearson chi-square with one degree of freedom, no continuity correction.
/// Raises ZeroMargin when a row or column sums to zero.
ChiSquareResult chi_square_2x2(const Table2x2& t);

/// Holm step-down adjustment, returned in input order.
std::vector<double> stepdown_adjust(std::span<const double> pvals);

inline constexpr int kScenarioCount = 4;

struct GroupCell {
    std::size_t n = 0;
    std::optional<double> mean;
    std::optional<double> se;// sample sd / sqrt(n); absent for n < 2
};

/// cells[g][s]: g = 0 successful / 1 unsuccessful at scenario 1, s = scenario - 1.
struct GroupSummary {
    std::array<std::array<GroupCell, kScenarioCount>, 2> cells;
    std::size_t participants = 0;
};

/// Participants holding exactly one session for each scenario 1..4.
/// Raises NoCompleteParticipants when there are none.
std::map<std::string, std::array<const SessionMetrics*, kScenarioCount>> complete_participants(
    std::span<const SessionMetrics> sessions);

GroupSummary group_summary(std::span<const SessionMetrics> sessions);
Table2x2 success_transition_table(std::span<const SessionMetrics> sessions);

struct EstimatorCell {
    metrics::EstimatorClass category = metrics::EstimatorClass::Accurate;
    std::size_t n = 0;
    std::size_t successful = 0;
    std::optional<double> success_rate;
};

/// Accurate / over / under counts with success proportions. Sessions
/// without a self estimate or in the Excluded band are left out.
struct EstimatorBreakdown {
    std::vector<EstimatorCell> cells;// only non-empty categories
    std::size_t excluded = 0;
};

EstimatorBreakdown estimator_breakdown(std::span<const SessionMetrics> sessions);

struct ScenarioCorrelation {
    int scenario = 0;
    std::size_t n = 0;
    std::optional<CorrelationResult> result;
    std::optional<double> p_adjusted;
    std::string note;// why the result is absent
};

struct Report {
    std::vector<SessionMetrics> sessions;
    std::vector<ScenarioCorrelation> correlations;
    std::optional<GroupSummary> groups;
    std::optional<Table2x2> transitions;
    std::optional<ChiSquareResult> transition_test;
    EstimatorBreakdown estimators;
};

/// IMPACT vs SURVEY-I correlation per scenario (Holm-adjusted across the
/// scenarios that have one), group means, transitions and estimator classes.
Report build_report(std::vector<SessionMetrics> sessions);

/// Writes report.json, correlations.csv, group_means.csv,
/// transition_table.csv, estimator_breakdown.csv, session_metrics.csv and
/// trajectories/<session>.{csv,json} into `dir`. `config` is echoed into
/// report.json.
void emit_report(const Report& report, const std::map<std::string, emotion::Trajectory>& trajectories,
                 const nlohmann::ordered_json& config, const std::filesystem::path& dir);

}// namespace mle::stats

#endif// MLE_STATS_REPORT_HPP
