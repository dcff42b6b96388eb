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
#include <mle/stats_report.hpp>
#include <mle/text_util.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mle::stats {

namespace {

using metrics::EstimatorClass;
using metrics::SuccessLabel;
using ojson = nlohmann::ordered_json;

std::string fmt(const std::optional<double>& v) {
    return v ? text::format_double(*v) : std::string(text::kAbsent);
}

ojson opt_json(const std::optional<double>& v) {
    return v ? ojson(*v) : ojson(nullptr);
}

bool successful(const SessionMetrics* s) {
    return s->success == SuccessLabel::Successful;
}

}// namespace

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "pearson inputs differ in length");
    const auto n = x.size();
    if (n < 3) throw Error(ErrorCode::DegenerateInput, "pearson needs at least 3 pairs");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorCode::ConstantInput, "pearson input is constant");
    CorrelationResult res;
    res.n = n;
    res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (std::abs(res.r) == 1.0) {
        res.p_two_sided = 0.0;
    } else {
        const double df = static_cast<double>(n - 2);
        const double t = res.r * std::sqrt(df / (1.0 - res.r * res.r));
        const boost::math::students_t dist(df);
        res.p_two_sided = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    }
    return res;
}

ChiSquareResult chi_square_2x2(const Table2x2& t) {
    if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw Error(ErrorCode::OutOfRange, "negative cell count");
    const double n = static_cast<double>(t.total());
    const double r1 = static_cast<double>(t.a + t.b), r2 = static_cast<double>(t.c + t.d);
    const double c1 = static_cast<double>(t.a + t.c), c2 = static_cast<double>(t.b + t.d);
    if (r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0) throw Error(ErrorCode::ZeroMargin, "table has an empty row or column");
    const std::array<double, 4> obs{static_cast<double>(t.a), static_cast<double>(t.b), static_cast<double>(t.c),
                                    static_cast<double>(t.d)};
    const std::array<double, 4> expct{r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n};
    ChiSquareResult res;
    res.n = t.total();
    for (std::size_t i = 0; i < 4; ++i) res.chi2 += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
    const boost::math::chi_squared dist(1.0);
    res.p = boost::math::cdf(boost::math::complement(dist, res.chi2));
    return res;
}

std::vector<double> stepdown_adjust(std::span<const double> pvals) {
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfRange, "p-value outside [0, 1]");
    }
    const auto m = pvals.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
    std::vector<double> out(m);
    double running = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        running = std::max(running, std::min(1.0, static_cast<double>(m - k) * pvals[order[k]]));
        out[order[k]] = running;
    }
    return out;
}

std::map<std::string, std::array<const SessionMetrics*, kScenarioCount>> complete_participants(
    std::span<const SessionMetrics> sessions) {
    std::map<std::string, std::array<const SessionMetrics*, kScenarioCount>> slots;
    std::map<std::string, bool> ambiguous;
    for (const auto& s : sessions) {
        auto& row = slots[s.participant_id];
        if (s.scenario_id < 1 || s.scenario_id > kScenarioCount) continue;
        auto& slot = row[static_cast<std::size_t>(s.scenario_id - 1)];
        if (slot) ambiguous[s.participant_id] = true;
        slot = &s;
    }
    std::map<std::string, std::array<const SessionMetrics*, kScenarioCount>> out;
    for (const auto& [pid, row] : slots) {
        if (ambiguous.contains(pid)) continue;
        if (std::all_of(row.begin(), row.end(), [](const SessionMetrics* p) { return p != nullptr; })) out.emplace(pid, row);
    }
    if (out.empty()) throw Error(ErrorCode::NoCompleteParticipants, "no participant has all four scenarios");
    return out;
}

GroupSummary group_summary(std::span<const SessionMetrics> sessions) {
    const auto complete = complete_participants(sessions);
    std::array<std::array<std::vector<double>, kScenarioCount>, 2> values;
    for (const auto& [pid, row] : complete) {
        const std::size_t g = successful(row[0]) ? 0 : 1;
        for (std::size_t s = 0; s < kScenarioCount; ++s) values[g][s].push_back(row[s]->impact.value);
    }
    GroupSummary out;
    out.participants = complete.size();
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t s = 0; s < kScenarioCount; ++s) {
            const auto& v = values[g][s];
            auto& cell = out.cells[g][s];
            cell.n = v.size();
            if (v.empty()) continue;
            const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            cell.mean = mean;
            if (v.size() >= 2) {
                double ss = 0.0;
                for (double x : v) ss += (x - mean) * (x - mean);
                cell.se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
            }
        }
    }
    return out;
}

Table2x2 success_transition_table(std::span<const SessionMetrics> sessions) {
    Table2x2 t;
    for (const auto& [pid, row] : complete_participants(sessions)) {
        const bool s1 = successful(row[0]);
        const bool s4 = successful(row[kScenarioCount - 1]);
        if (s1 && s4) ++t.a;
        if (s1 && !s4) ++t.b;
        if (!s1 && s4) ++t.c;
        if (!s1 && !s4) ++t.d;
    }
    return t;
}

EstimatorBreakdown estimator_breakdown(std::span<const SessionMetrics> sessions) {
    constexpr std::array kOrder{EstimatorClass::Accurate, EstimatorClass::OverEstimator, EstimatorClass::UnderEstimator};
    EstimatorBreakdown out;
    std::array<EstimatorCell, 3> cells;
    for (std::size_t k = 0; k < kOrder.size(); ++k) cells[k].category = kOrder[k];
    for (const auto& s : sessions) {
        if (!s.estimator) continue;
        if (*s.estimator == EstimatorClass::Excluded) {
            ++out.excluded;
            continue;
        }
        auto& cell = cells[static_cast<std::size_t>(std::find(kOrder.begin(), kOrder.end(), *s.estimator) - kOrder.begin())];
        ++cell.n;
        if (s.success == SuccessLabel::Successful) ++cell.successful;
    }
    for (auto& c : cells) {
        if (c.n == 0) continue;
        c.success_rate = static_cast<double>(c.successful) / static_cast<double>(c.n);
        out.cells.push_back(c);
    }
    return out;
}

Report build_report(std::vector<SessionMetrics> sessions) {
    std::sort(sessions.begin(), sessions.end(),
              [](const SessionMetrics& a, const SessionMetrics& b) { return a.session_id < b.session_id; });
    Report rep;
    rep.sessions = std::move(sessions);

    std::vector<double> raw_p;
    std::vector<std::size_t> with_p;
    for (int sc = 1; sc <= kScenarioCount; ++sc) {
        ScenarioCorrelation corr;
        corr.scenario = sc;
        std::vector<double> impact, survey;
        for (const auto& s : rep.sessions) {
            if (s.scenario_id != sc) continue;
            impact.push_back(s.impact.value);
            survey.push_back(s.survey_i);
        }
        corr.n = impact.size();
        try {
            corr.result = pearson(impact, survey);
            raw_p.push_back(corr.result->p_two_sided);
            with_p.push_back(rep.correlations.size());
        } catch (const Error& e) {
            corr.note = std::string(to_string(e.code()));
        }
        rep.correlations.push_back(corr);
    }
    const auto adjusted = stepdown_adjust(raw_p);
    for (std::size_t k = 0; k < with_p.size(); ++k) rep.correlations[with_p[k]].p_adjusted = adjusted[k];

    try {
        rep.groups = group_summary(rep.sessions);
        rep.transitions = success_transition_table(rep.sessions);
        rep.transition_test = chi_square_2x2(*rep.transitions);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoCompleteParticipants && e.code() != ErrorCode::ZeroMargin) throw;
    }
    rep.estimators = estimator_breakdown(rep.sessions);
    return rep;
}

void emit_report(const Report& report, const std::map<std::string, emotion::Trajectory>& trajectories,
                 const nlohmann::ordered_json& config, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "trajectories", ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + (dir / "trajectories").string() + ": " + ec.message());

    ojson doc;
    doc["config"] = config;
    doc["sessions"] = report.sessions.size();

    std::string corr_csv = "scenario,n,r,p,p_adjusted\n";
    auto& corr_json = doc["correlations"] = ojson::array();
    for (const auto& c : report.correlations) {
        const auto r = c.result ? std::optional(c.result->r) : std::nullopt;
        const auto p = c.result ? std::optional(c.result->p_two_sided) : std::nullopt;
        corr_csv += std::to_string(c.scenario) + "," + std::to_string(c.n) + "," + fmt(r) + "," + fmt(p) + "," + fmt(c.p_adjusted) + "\n";
        ojson j{{"scenario", c.scenario}, {"n", c.n}, {"r", opt_json(r)}, {"p", opt_json(p)}, {"p_adjusted", opt_json(c.p_adjusted)}};
        if (!c.note.empty()) j["note"] = c.note;
        corr_json.push_back(j);
    }

    std::string group_csv = "group,scenario,n,mean_impact,se\n";
    ojson groups = nullptr;
    if (report.groups) {
        groups = ojson::object();
        groups["participants"] = report.groups->participants;
        ojson cells = ojson::array();
        ojson delta = ojson::object();
        for (std::size_t g = 0; g < 2; ++g) {
            const std::string name = g == 0 ? "successful" : "unsuccessful";
            for (std::size_t s = 0; s < kScenarioCount; ++s) {
                const auto& cell = report.groups->cells[g][s];
                group_csv += name + "," + std::to_string(s + 1) + "," + std::to_string(cell.n) + "," + fmt(cell.mean) + "," + fmt(cell.se) + "\n";
                cells.push_back({{"group", name}, {"scenario", s + 1}, {"n", cell.n}, {"mean_impact", opt_json(cell.mean)}, {"se", opt_json(cell.se)}});
            }
            // Planned contrast, point estimate only.
            const auto& first = report.groups->cells[g][0].mean;
            const auto& last = report.groups->cells[g][kScenarioCount - 1].mean;
            delta[name] = opt_json(first && last ? std::optional(*last - *first) : std::nullopt);
        }
        groups["cells"] = std::move(cells);
        groups["delta_s4_minus_s1"] = std::move(delta);
    }
    doc["group_means"] = groups;

    std::string trans_csv = "s1_status,s4_successful,s4_unsuccessful\n";
    ojson trans = nullptr;
    if (report.transitions) {
        const auto& t = *report.transitions;
        trans_csv += "successful," + std::to_string(t.a) + "," + std::to_string(t.b) + "\n";
        trans_csv += "unsuccessful," + std::to_string(t.c) + "," + std::to_string(t.d) + "\n";
        trans = {{"table", {{t.a, t.b}, {t.c, t.d}}}};
        if (report.transition_test) {
            trans["chi2"] = report.transition_test->chi2;
            trans["p"] = report.transition_test->p;
            trans["n"] = report.transition_test->n;
        }
    }
    doc["transitions"] = trans;

    std::string est_csv = "category,n,successful,success_rate\n";
    auto& est = doc["estimator_breakdown"] = ojson::object();
    est["excluded"] = report.estimators.excluded;
    auto& est_cells = est["categories"] = ojson::array();
    for (const auto& c : report.estimators.cells) {
        const std::string name(metrics::to_string(c.category));
        est_csv += name + "," + std::to_string(c.n) + "," + std::to_string(c.successful) + "," + fmt(c.success_rate) + "\n";
        est_cells.push_back({{"category", name}, {"n", c.n}, {"successful", c.successful}, {"success_rate", opt_json(c.success_rate)}});
    }

    std::string sess_csv = "session_id,participant_id,scenario_id,impact,positive_s,neutral_s,negative_s,survey_i,survey_p,success,estimator,self_impact\n";
    for (const auto& s : report.sessions) {
        sess_csv += s.session_id + "," + s.participant_id + "," + std::to_string(s.scenario_id) + "," +
                    text::format_double(s.impact.value) + "," + text::format_double(s.impact.positive_s) + "," +
                    text::format_double(s.impact.neutral_s) + "," + text::format_double(s.impact.negative_s) + "," +
                    text::format_double(s.survey_i) + "," + text::format_double(s.survey_p) + "," +
                    std::string(metrics::to_string(s.success)) + "," +
                    (s.estimator ? std::string(metrics::to_string(*s.estimator)) : std::string(text::kAbsent)) + "," +
                    fmt(s.self_impact ? std::optional(s.self_impact->value) : std::nullopt) + "\n";
    }

    auto& traj_list = doc["trajectories"] = ojson::array();
    for (const auto& [id, tr] : trajectories) {
        std::string csv = "t_norm,x,y\n";
        for (const auto& p : tr.points) {
            csv += text::format_double(p.t_norm) + "," + text::format_double(p.v.x) + "," + text::format_double(p.v.y) + "\n";
        }
        ojson tj{{"session_id", id}, {"points", tr.points.size()}};
        try {
            const auto com = emotion::center_of_mass(tr);
            tj["center_of_mass"] = {com.x, com.y};
            const auto pca = emotion::pca2(tr);
            tj["pca"] = {{"components", {{pca.components[0].x, pca.components[0].y}, {pca.components[1].x, pca.components[1].y}}},
                         {"explained_variance", {pca.explained_variance[0], pca.explained_variance[1]}}};
            const auto el = emotion::confidence_ellipse(tr);
            tj["ellipse"] = {{"center", {el.center.x, el.center.y}},
                             {"semi_axes", {el.semi_axes[0], el.semi_axes[1]}},
                             {"angle", el.angle},
                             {"thin", el.thin}};
        } catch (const Error& e) {
            tj["note"] = std::string(to_string(e.code()));
        }
        text::write_file_atomic(dir / "trajectories" / (id + ".csv"), csv);
        text::write_file_atomic(dir / "trajectories" / (id + ".json"), tj.dump(2) + "\n");
        traj_list.push_back(id);
    }

    text::write_file_atomic(dir / "correlations.csv", corr_csv);
    text::write_file_atomic(dir / "group_means.csv", group_csv);
    text::write_file_atomic(dir / "transition_table.csv", trans_csv);
    text::write_file_atomic(dir / "estimator_breakdown.csv", est_csv);
    text::write_file_atomic(dir / "session_metrics.csv", sess_csv);
    text::write_file_atomic(dir / "report.json", doc.dump(2) + "\n");
}

}// namespace mle::stats
