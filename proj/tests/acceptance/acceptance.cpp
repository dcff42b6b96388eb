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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <mle/audio_dsp.hpp>
#include <mle/config.hpp>
#include <mle/corpus.hpp>
#include <mle/emotion_space.hpp>
#include <mle/impact_metrics.hpp>
#include <mle/predictor.hpp>
#include <mle/session_store.hpp>
#include <mle/stats_report.hpp>
#include <mle/synth.hpp>
#include <mle/text_util.hpp>

#include "../support/emotion_tables.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>

using namespace mle;
namespace fs = std::filesystem;
using metrics::SuccessLabel;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// --- chi-square anchor ------------------------------------------------------

void chi_square_anchor(Outcome& o) {
    const auto t0 = Clock::now();
    const auto r = stats::chi_square_2x2({20, 3, 12, 16});
    const double elapsed = seconds_since(t0);
    o.detail << "chi2=" << r.chi2 << " p=" << r.p << " t=" << elapsed * 1e3 << "ms";
    o.require(std::abs(r.chi2 - 10.51) <= 0.02, "chi2 within 10.51 +/- 0.02");
    o.require(r.p < 0.0012, "p < 0.0012");
    o.require(elapsed < 1e-3, "runtime < 1 ms");
}

// --- emotion map --------------------------------------------------------------

void emotion_map_fidelity(Outcome& o) {
    const auto t0 = Clock::now();
    int mismatched = 0;
    for (const auto& row : tables::kCoordinates) {
        emotion::EmotionFrame f;
        f.p[*emotion::canonical_index(row.name)] = 1.0;
        const auto v = emotion::emotion_vector(f);
        if (v.x != row.x || v.y != row.y) ++mismatched;
    }
    o.require(std::size(tables::kCoordinates) == emotion::kEmotionCount, "48 rows");
    o.require(mismatched == 0, "one-hot coordinates exact");

    // Each one-hot frame occupies exactly the clusters that list its emotion.
    int wrong = 0;
    for (const auto& row : tables::kCoordinates) {
        emotion::EmotionFrame f;
        f.p[*emotion::canonical_index(row.name)] = 1.0;
        const std::vector<emotion::EmotionFrame> frames{f};
        std::set<std::string> got, want;
        for (const auto& c : emotion::cluster_occupancy(frames)) {
            if (c.mass > 0.0) got.insert(c.name);
        }
        for (const auto& c : tables::kClusters) {
            if (std::find(c.members.begin(), c.members.end(), row.name) != c.members.end()) want.insert(std::string(c.name));
        }
        if (got != want) ++wrong;
    }
    o.require(wrong == 0, "cluster memberships");
    emotion::EmotionFrame det;
    det.p[*emotion::canonical_index("Determination")] = 1.0;
    const std::vector<emotion::EmotionFrame> frames{det};
    std::set<std::string> det_clusters;
    for (const auto& c : emotion::cluster_occupancy(frames)) {
        if (c.mass > 0.0) det_clusters.insert(c.name);
    }
    o.require(det_clusters.contains("Active-Positive") && det_clusters.contains("Engaged-Positive"),
              "Determination in two clusters");
    const double elapsed = seconds_since(t0);
    o.detail << "coordinate mismatches=" << mismatched << " cluster mismatches=" << wrong << " t=" << elapsed << "s";
    o.require(elapsed < 1.0, "runtime < 1 s");
}

// --- emotion vector formula ---------------------------------------------------

emotion::Vec2 table_sum(const emotion::EmotionFrame& f) {
    long double x = 0.0L, y = 0.0L;
    for (const auto& row : tables::kCoordinates) {
        const double p = f.p[*emotion::canonical_index(row.name)];
        x += static_cast<long double>(p) * row.x;
        y += static_cast<long double>(p) * row.y;
    }
    return {static_cast<double>(x), static_cast<double>(y)};
}

void emotion_vector_formula(Outcome& o) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto random_frame = [&] {
        emotion::EmotionFrame f;
        for (auto& p : f.p) p = u(rng);
        return f;
    };
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto f = random_frame();
        const auto v = emotion::emotion_vector(f);
        const auto w = table_sum(f);
        worst = std::max({worst, std::abs(v.x - w.x), std::abs(v.y - w.y)});
    }
    double worst_lin = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto a = random_frame();
        const auto b = random_frame();
        const double alpha = u(rng) * 2.0 - 0.5;
        emotion::EmotionFrame mix;
        for (std::size_t i = 0; i < emotion::kEmotionCount; ++i) mix.p[i] = a.p[i] + alpha * b.p[i];
        const auto va = emotion::emotion_vector(a);
        const auto vb = emotion::emotion_vector(b);
        const auto vm = emotion::emotion_vector(mix);
        worst_lin = std::max({worst_lin, std::abs(vm.x - (va.x + alpha * vb.x)), std::abs(vm.y - (va.y + alpha * vb.y))});
    }
    o.detail << "max|v-oracle|=" << worst << " max linearity residual=" << worst_lin;
    o.require(worst <= 1e-12, "brute-force sum within 1e-12");
    o.require(worst_lin <= 1e-12, "linearity within 1e-12");
}

// --- resampling ---------------------------------------------------------------

void resampling_oracle(Outcome& o) {
    constexpr double kRate = 30.0;
    std::mt19937_64 rng(77);
    int mismatched = 0;
    double worst_dwell = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double dur = std::uniform_real_distribution<double>(1.0, 400.0)(rng);
        const auto stream = oracle::random_stream(rng, dur, 60);
        const auto series = store::resample_events(stream, dur, kRate);
        if (series.values != oracle::zoh(stream, dur, kRate)) ++mismatched;

        // Runs of constant state between ordinal events, against the frames
        // the series assigns to them.
        std::vector<std::pair<double, int>> changes{{0.0, 0}};
        for (const auto& e : stream.events) {
            if (!store::is_ordinal(e.value)) continue;
            const int v = store::valence(e.value);
            if (v != changes.back().second) changes.push_back({e.t, v});
        }
        for (std::size_t i = 0; i < changes.size(); ++i) {
            const double start = changes[i].first;
            const double end = i + 1 < changes.size() ? changes[i + 1].first : dur;
            // Each frame counts for the part of it that lies inside the session.
            double dwell = 0.0;
            for (std::size_t f = 0; f < series.values.size(); ++f) {
                const double c = (static_cast<double>(f) + 0.5) / kRate;
                if (c >= start && (c < end || (i + 1 == changes.size())) && series.values[f] == changes[i].second) {
                    dwell += std::min(static_cast<double>(f + 1) / kRate, dur) - static_cast<double>(f) / kRate;
                }
            }
            worst_dwell = std::max(worst_dwell, std::abs(dwell - (end - start)));
        }
    }
    o.detail << "mismatched streams=" << mismatched << "/500 worst dwell error=" << worst_dwell << "s";
    o.require(mismatched == 0, "sample-for-sample match");
    o.require(worst_dwell <= 1.0 / 30.0 + 1e-12, "dwell error <= 1/30 s");
}

// --- DSP ----------------------------------------------------------------------

void dsp_suite(Outcome& o) {
    const auto t0 = Clock::now();
    const auto tone = synth::sine(220.0, 2.0, 16000, 0.5);
    const auto track = dsp::f0_track(tone);
    std::vector<double> f0s;
    for (const auto& w : track.windows) {
        if (w.f0) f0s.push_back(*w.f0);
    }
    o.require(!f0s.empty(), "voiced windows");
    double f0 = 0.0;
    for (double v : f0s) f0 += v / static_cast<double>(f0s.size());
    const auto cycles = dsp::extract_cycles(tone.samples, tone.sample_rate, f0);
    const double jit = dsp::jitter(cycles.periods_s);
    const double shim = dsp::shimmer(cycles.amplitudes);
    const double h = dsp::hnr(tone);
    o.detail << "F0=" << f0 << "Hz jitter=" << jit * 100 << "% shimmer=" << shim * 100 << "% HNR=" << h << "dB";
    o.require(std::abs(f0 - 220.0) <= 2.0, "F0 within 2 Hz");
    o.require(jit < 0.005, "jitter < 0.5%");
    o.require(shim < 0.005, "shimmer < 0.5%");
    o.require(h >= 40.0, "HNR >= 40 dB");

    const std::vector<synth::Resonance> res{{700.0, 80.0}, {1200.0, 90.0}};
    const auto fm = dsp::formants(synth::vowel(120.0, res, 1.5, 16000));
    const bool have = fm.mean[0] && fm.mean[1];
    o.require(have, "F1 and F2 present");
    if (have) {
        o.detail << " F1=" << *fm.mean[0] << " F2=" << *fm.mean[1];
        o.require(std::abs(*fm.mean[0] - 700.0) <= 70.0, "F1 within 10%");
        o.require(std::abs(*fm.mean[1] - 1200.0) <= 120.0, "F2 within 10%");
    }

    const auto silent = dsp::audio_feature_vector(synth::silence(2.0, 16000));
    const bool all_absent = std::all_of(silent.values.begin(), silent.values.end(), [](const auto& v) { return !v; });
    o.require(!silent.usable && all_absent, "silence unusable with absent values");
    const double elapsed = seconds_since(t0);
    o.detail << " t=" << elapsed << "s";
    o.require(elapsed < 30.0, "runtime < 30 s");
}

// --- SVM ----------------------------------------------------------------------

void svm_equivalence(Outcome& o) {
    std::mt19937_64 rng(5150);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 4 + static_cast<std::size_t>(k % 5);
        const std::size_t p = 1 + static_cast<std::size_t>(k % 3);
        const auto d = oracle::random_dataset(rng, n, p);
        const auto m = predict::train_linear_svm(d);
        const auto q = oracle::qp_svm(d, 1.0);
        for (const auto& r : d.rows) worst = std::max(worst, std::abs(m.decision(r.x) - q.decision(r.x)));
    }
    o.require(worst <= 1e-4, "decision scores within 1e-4 of the QP oracle");

    // Clusters of half-width 1 whose facing edges are 5 apart.
    predict::Dataset sep;
    sep.feature_names = {"a", "b"};
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const bool pos = i % 2 == 0;
        sep.rows.push_back({"r" + std::to_string(i), {(pos ? 3.5 : -3.5) + u(rng), u(rng)},
                            pos ? SuccessLabel::Successful : SuccessLabel::Unsuccessful});
    }
    const auto cv = predict::loo_cv(sep);
    o.require(cv.accuracy == 1.0, "separable LOO accuracy 100%");

    int auc_mismatch = 0;
    std::uniform_int_distribution<int> level(0, 9);
    for (int k = 0; k < 200; ++k) {
        const int n = 2 + k % 40;
        std::vector<double> s;
        std::vector<SuccessLabel> y;
        for (int i = 0; i < n; ++i) {
            s.push_back(k % 2 == 0 ? level(rng) : u(rng));
            y.push_back(i % 2 == 0 ? SuccessLabel::Successful : SuccessLabel::Unsuccessful);
        }
        std::shuffle(y.begin(), y.end(), rng);
        if (predict::roc_auc(s, y).auc != oracle::mann_whitney_auc(s, y)) ++auc_mismatch;
    }
    o.require(auc_mismatch == 0, "AUC equals pair counting");
    o.detail << "max score gap=" << worst << " separable LOO acc=" << cv.accuracy << " AUC mismatches=" << auc_mismatch
             << "/200";
}

// --- feature selection --------------------------------------------------------

void feature_selection(Outcome& o) {
    const auto t0 = Clock::now();
    const auto cohort = synth::make_feature_cohort({});
    const auto sel = predict::select_features(cohort.data);
    const auto sub = predict::select_columns(cohort.data, sel.selected);
    double max_corr = 0.0;
    for (std::size_t a = 0; a < sub.feature_names.size(); ++a) {
        for (std::size_t b = a + 1; b < sub.feature_names.size(); ++b) {
            max_corr = std::max(max_corr, std::abs(predict::column_correlation(sub, a, b)));
        }
    }
    const double elapsed = seconds_since(t0);
    o.detail << "features=" << cohort.data.feature_names.size() << " selected=" << sel.selected.size()
             << " max|corr|=" << max_corr << " t=" << elapsed << "s";
    o.require(cohort.data.feature_names.size() == 53, "53 input features");
    o.require(sel.selected.size() <= 20, "at most 20 selected");
    o.require(max_corr <= 0.9, "max |corr| <= 0.9");
    o.require(sel.selected.size() == 17, "exactly 17 survivors");
    o.require(elapsed < 10.0, "runtime < 10 s");
}

// --- end to end -----------------------------------------------------------------

void end_to_end(Outcome& o) {
    const auto t0 = Clock::now();
    fixture::TempDir root;
    const auto sessions = synth::make_session_cohort({});
    for (const auto& s : sessions) store::write_bundle(s, root / s.session_id);
    const auto entries = corpus::load(root.path(), workers());
    const Config cfg;
    const auto table = corpus::feature_table(entries, corpus::FeatureMode::Full, cfg, workers());
    const auto data = predict::build_dataset(table, corpus::success_labels(entries));
    o.require(sessions.size() == 204 && data.rows.size() == 204, "204 sessions in the dataset");
    o.require(data.positives() == 130, "130 positive");

    const auto full = predict::evaluate_mode(data, predict::EvalMode::Full, cfg.svm, cfg.selection, workers());
    o.detail << "rows=" << data.rows.size() << " positives=" << data.positives() << " AUC=" << full.roc.auc;
    o.require(full.roc.auc >= 0.95, "AUC >= 0.95");

    double mean = 0.0;
    constexpr int kShuffles = 5;
    o.detail << " shuffled AUCs=";
    for (int k = 0; k < kShuffles; ++k) {
        auto shuffled = data;
        std::vector<SuccessLabel> y;
        for (const auto& r : shuffled.rows) y.push_back(r.y);
        std::mt19937_64 rng(100 + static_cast<std::uint64_t>(k));
        std::shuffle(y.begin(), y.end(), rng);
        for (std::size_t i = 0; i < y.size(); ++i) shuffled.rows[i].y = y[i];
        const auto r = predict::evaluate_mode(shuffled, predict::EvalMode::Full, cfg.svm, cfg.selection, workers());
        o.detail << (k ? "," : "") << r.roc.auc;
        mean += r.roc.auc / kShuffles;
    }
    const double elapsed = seconds_since(t0);
    o.detail << " mean=" << mean << " t=" << elapsed << "s";
    o.require(std::abs(mean - 0.5) <= 0.05, "shuffled mean AUC 0.5 +/- 0.05");
    o.require(elapsed < 300.0, "runtime < 5 min");
}

// --- metrics ------------------------------------------------------------------

void metrics_suite(Outcome& o) {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> v(-1, 1);
    std::uniform_int_distribution<int> len(1, 12000);
    int broken = 0;
    for (int k = 0; k < 1000; ++k) {
        store::SampledSeries s;
        s.values.resize(static_cast<std::size_t>(len(rng)));
        // Runs rather than white noise, like real rating streams.
        int state = v(rng);
        for (auto& x : s.values) {
            if (rng() % 50 == 0) state = v(rng);
            x = state;
        }
        const auto r = metrics::impact_score(s);
        const double duration = static_cast<double>(s.values.size()) / s.rate;
        if (std::abs(r.value - (r.positive_s - r.negative_s)) > 1e-9 || std::abs(r.value) > duration + 1e-9) ++broken;
    }
    o.require(broken == 0, "signed-second identities");
    using metrics::EstimatorClass;
    const bool est = metrics::estimator_category(7, metrics::survey_participant(6)) == EstimatorClass::Accurate &&
                     metrics::estimator_category(8, metrics::survey_participant(5)) == EstimatorClass::OverEstimator &&
                     metrics::estimator_category(3, metrics::survey_participant(2)) == EstimatorClass::Excluded &&
                     metrics::estimator_category(5, metrics::survey_participant(9)) == EstimatorClass::Excluded;
    o.require(est, "estimator examples");
    const bool threshold = metrics::classify_success({7.0}) == SuccessLabel::Successful &&
                           metrics::classify_success({std::nextafter(7.0, 0.0)}) == SuccessLabel::Unsuccessful;
    o.require(threshold, "success threshold inclusive at 7");
    o.detail << "identity violations=" << broken << "/1000 estimator examples=" << (est ? "ok" : "wrong")
             << " threshold=" << (threshold ? "ok" : "wrong");
}

// --- CLI determinism ------------------------------------------------------------

int run_cli(const std::string& args, const fs::path& out, const fs::path& err) {
    const std::string cmd = std::string("'") + MLE_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = text::read_file(e.path());
    }
    return out;
}

void cli_determinism(Outcome& o) {
    fixture::TempDir scratch;
    synth::SessionCohortSpec spec;
    spec.participants = 3;
    spec.positives = 6;
    spec.speech_s = 2.0;
    const auto sessions = synth::make_session_cohort(spec);
    for (const char* copy : {"a", "b"}) {
        for (const auto& s : sessions) store::write_bundle(s, scratch / copy / s.session_id);
    }
    text::write_file_atomic(scratch / "self.jsonl", "{\"t\":0.2,\"v\":\"positive\"}\n{\"t\":1.1,\"v\":\"negative\"}\n");
    const std::string feats = (scratch / "features.csv").string();
    const std::string labels = (scratch / "labels.csv").string();
    if (run_cli("features --root '" + (scratch / "a").string() + "' --out '" + feats + "' --labels-out '" + labels + "'",
                scratch / "o", scratch / "e") != 0) {
        o.require(false, "features setup");
        return;
    }
    const std::string fl = " --features '" + feats + "' --labels '" + labels + "'";
    const std::string id = sessions.front().session_id;

    int checked = 0;
    const auto same = [&](const std::string& name, const std::function<std::string(const std::string&)>& args,
                          const std::function<std::string(const std::string&)>& collect) {
        std::string outputs[2];
        int status[2];
        const char* tags[2] = {"a", "b"};
        for (int k = 0; k < 2; ++k) {
            status[k] = run_cli(args(tags[k]), scratch / ("out_" + std::string(tags[k])), scratch / "err");
            outputs[k] = text::read_file(scratch / ("out_" + std::string(tags[k]))) + collect(tags[k]);
        }
        ++checked;
        o.require(status[0] == 0 && status[1] == 0, name + " exit 0");
        o.require(outputs[0] == outputs[1], name + " byte-identical");
    };
    const auto none = [](const std::string&) { return std::string(); };
    const auto root = [&](const std::string&) { return "--root '" + (scratch / "a").string() + "'"; };
    same("ingest", [&](const std::string& t) { return "ingest " + root(t); }, none);
    same("validate", [&](const std::string& t) { return "validate " + root(t); }, none);
    same("features", [&](const std::string& t) { return "features " + root(t); }, none);
    same("train", [&](const std::string&) { return "train" + fl; }, none);
    same("evaluate", [&](const std::string&) { return "evaluate" + fl; }, none);
    same("report",
         [&](const std::string& t) { return "report " + root(t) + " --out-dir '" + (scratch / ("report_" + t)).string() + "'"; },
         [&](const std::string& t) {
             std::string all;
             for (const auto& [k, v] : tree(scratch / ("report_" + t))) all += k + "\n" + v;
             return all;
         });
    // Each run merges into its own copy of the corpus; the resulting bundles must agree.
    same("merge-annotations",
         [&](const std::string& t) {
             return "merge-annotations --root '" + (scratch / t).string() + "' --annotation " + id + "='" +
                    (scratch / "self.jsonl").string() + "'";
         },
         [&](const std::string& t) {
             std::string all;
             for (const auto& [k, v] : tree(scratch / t)) all += k + "\n" + v;
             return all;
         });
    o.detail << "subcommands compared=" << checked;
}

}// namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"chi-square anchor", chi_square_anchor},
        {"emotion-map fidelity", emotion_map_fidelity},
        {"emotion-vector formula", emotion_vector_formula},
        {"resampling oracle", resampling_oracle},
        {"DSP synthesis suite", dsp_suite},
        {"SVM oracle equivalence", svm_equivalence},
        {"feature-selection arithmetic", feature_selection},
        {"end-to-end synthetic cohort", end_to_end},
        {"metrics suite", metrics_suite},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            check(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        if (!o.pass) ++failed;
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
