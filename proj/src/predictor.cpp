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
#include <mle/emotion_space.hpp>
#include <mle/error.hpp>
#include <mle/predictor.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace mle::predict {

namespace {

constexpr double kTau = 1e-12;

void check_trainable(const Dataset& d, double C) {
    if (d.rows.empty()) throw Error(ErrorCode::EmptyDataset, "no rows to train on");
    if (d.feature_names.empty()) throw Error(ErrorCode::EmptyDataset, "no feature columns");
    if (d.positives() == 0 || d.negatives() == 0) throw Error(ErrorCode::SingleClass, "training data holds one class");
    if (!(C > 0.0)) throw Error(ErrorCode::BadArgument, "C must be positive");
}

// SMO on  min 1/2 a'Qa - e'a,  0 <= a <= C,  y'a = 0,  Q = (y y') .* K.
struct Smo {
    const Eigen::MatrixXd& K;
    const std::vector<double>& y;
    double C;
    std::vector<double> a;
    std::vector<double> G;// gradient Qa - e

    Smo(const Eigen::MatrixXd& k, const std::vector<double>& labels, double c)
        : K(k), y(labels), C(c), a(labels.size(), 0.0), G(labels.size(), -1.0) {}

    bool upper(std::size_t t) const { return a[t] >= C; }
    bool lower(std::size_t t) const { return a[t] <= 0.0; }
    bool in_up(std::size_t t) const { return y[t] > 0 ? !upper(t) : !lower(t); }
    bool in_low(std::size_t t) const { return y[t] > 0 ? !lower(t) : !upper(t); }

    // Returns false once the maximal violation is below eps.
    bool select(double eps, std::size_t& i_out, std::size_t& j_out) const {
        const auto n = a.size();
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * G[t] > gmax) {
                gmax = -y[t] * G[t];
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            gmax2 = std::max(gmax2, y[t] * G[t]);
            const double diff = gmax + y[t] * G[t];
            if (i == n || diff <= 0.0) continue;
            const double quad = std::max(K(i, i) + K(t, t) - 2.0 * K(i, t), kTau);
            const double obj = -(diff * diff) / quad;
            if (obj < best) {
                best = obj;
                j = t;
            }
        }
        if (i == n || j == n || gmax + gmax2 < eps) return false;
        i_out = i;
        j_out = j;
        return true;
    }

    void update(std::size_t i, std::size_t j) {
        const double ai = a[i];
        const double aj = a[j];
        const double quad = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), kTau);
        if (y[i] != y[j]) {
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0.0) {
                if (a[j] < 0.0) {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if (diff > 0.0) {
                if (a[i] > C) {
                    a[i] = C;
                    a[j] = C - diff;
                }
            } else if (a[j] > C) {
                a[j] = C;
                a[i] = C + diff;
            }
        } else {
            const double delta = (G[i] - G[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > C) {
                if (a[i] > C) {
                    a[i] = C;
                    a[j] = sum - C;
                }
            } else if (a[j] < 0.0) {
                a[j] = 0.0;
                a[i] = sum;
            }
            if (sum > C) {
                if (a[j] > C) {
                    a[j] = C;
                    a[i] = sum - C;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
        const double di = a[i] - ai;
        const double dj = a[j] - aj;
        for (std::size_t t = 0; t < a.size(); ++t) G[t] += y[t] * (y[i] * K(t, i) * di + y[j] * K(t, j) * dj);
    }

    // Bias: average over free vectors, else the middle of the feasible interval.
    double bias() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        int n_free = 0;
        for (std::size_t t = 0; t < a.size(); ++t) {
            const double yg = y[t] * G[t];
            if (upper(t)) {
                if (y[t] < 0) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else if (lower(t)) {
                if (y[t] > 0) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        const double rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
        return -rho;
    }
};

}// namespace

double SvmModel::decision(std::span<const double> raw_x) const {
    const auto z = scaler.apply(raw_x);
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * z[j];
    return s;
}

SuccessLabel SvmModel::predict(std::span<const double> raw_x) const {
    return decision(raw_x) > 0.0 ? SuccessLabel::Successful : SuccessLabel::Unsuccessful;
}

SvmModel train_linear_svm(const Dataset& d, const SvmOptions& opt) {
    check_trainable(d, opt.C);
    const auto n = d.rows.size();
    const auto p = d.feature_names.size();
    SvmModel m;
    m.feature_names = d.feature_names;
    m.C = opt.C;
    m.scaler = Scaler::fit(d);

    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto z = m.scaler.apply(d.rows[i].x);
        for (std::size_t j = 0; j < p; ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z[j];
        y[i] = sign(d.rows[i].y);
    }
    const Eigen::MatrixXd K = X * X.transpose();

    Smo smo(K, y, opt.C);
    std::size_t i = 0, j = 0;
    while (m.iterations < opt.max_iterations && smo.select(opt.tolerance, i, j)) {
        smo.update(i, j);
        ++m.iterations;
    }

    m.w.assign(p, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        if (smo.a[r] == 0.0) continue;
        for (std::size_t c = 0; c < p; ++c) {
            m.w[c] += smo.a[r] * y[r] * X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    m.b = smo.bias();
    return m;
}

CvResult loo_cv(const Dataset& d, const SvmOptions& opt, int workers) {
    const auto n = d.rows.size();
    if (n < 3) throw Error(ErrorCode::EmptyDataset, "leave-one-out needs at least 3 rows");
    if (d.positives() == 0 || d.negatives() == 0) throw Error(ErrorCode::SingleClass, "dataset holds one class");

    std::vector<std::optional<Prediction>> slots(n);
    std::atomic<std::size_t> next{0};
    const auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            Dataset train;
            train.feature_names = d.feature_names;
            train.rows.reserve(n - 1);
            for (std::size_t r = 0; r < n; ++r) {
                if (r != i) train.rows.push_back(d.rows[r]);
            }
            if (train.positives() == 0 || train.negatives() == 0) continue;
            const auto model = train_linear_svm(train, opt);
            const double s = model.decision(d.rows[i].x);
            slots[i] = Prediction{d.rows[i].session_id, d.rows[i].y, s,
                                  s > 0.0 ? SuccessLabel::Successful : SuccessLabel::Unsuccessful};
        }
    };
    const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, 64));
    if (threads == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run);
    }

    CvResult out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!slots[i]) {
            out.skipped.push_back(d.rows[i].session_id);
            continue;
        }
        const auto& p = *slots[i];
        const bool pos = p.predicted == SuccessLabel::Successful;
        const bool truth = p.truth == SuccessLabel::Successful;
        if (pos && truth) ++out.confusion.tp;
        if (pos && !truth) ++out.confusion.fp;
        if (!pos && !truth) ++out.confusion.tn;
        if (!pos && truth) ++out.confusion.fn;
        out.predictions.push_back(p);
    }
    if (!out.predictions.empty()) {
        out.accuracy = static_cast<double>(out.confusion.tp + out.confusion.tn) / static_cast<double>(out.predictions.size());
    }
    return out;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const SuccessLabel> labels) {
    if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
    std::int64_t P = 0, N = 0;
    for (auto l : labels) (l == SuccessLabel::Successful ? P : N) += 1;
    if (P == 0 || N == 0) throw Error(ErrorCode::SingleClass, "ROC needs both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    std::int64_t tp = 0, fp = 0, area2 = 0;// area2 = 2 * P * N * AUC
    for (std::size_t k = 0; k < order.size();) {
        std::int64_t dtp = 0, dfp = 0;
        std::size_t e = k;
        while (e < order.size() && scores[order[e]] == scores[order[k]]) {
            (labels[order[e]] == SuccessLabel::Successful ? dtp : dfp) += 1;
            ++e;
        }
        area2 += dfp * (2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        roc.points.push_back({static_cast<double>(fp) / static_cast<double>(N), static_cast<double>(tp) / static_cast<double>(P)});
        k = e;
    }
    roc.auc = static_cast<double>(area2) / static_cast<double>(2 * P * N);
    return roc;
}

double column_correlation(const Dataset& d, std::size_t a, std::size_t b) {
    const auto n = static_cast<double>(d.rows.size());
    double ma = 0.0, mb = 0.0;
    for (const auto& r : d.rows) {
        ma += r.x[a];
        mb += r.x[b];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (const auto& r : d.rows) {
        sab += (r.x[a] - ma) * (r.x[b] - mb);
        saa += (r.x[a] - ma) * (r.x[a] - ma);
        sbb += (r.x[b] - mb) * (r.x[b] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

FeatureSelection select_features(const Dataset& d, const SvmOptions& svm, const SelectionOptions& sel) {
    const auto model = train_linear_svm(d, svm);
    std::vector<std::size_t> order(d.feature_names.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(model.w[a]) > std::abs(model.w[b]); });
    order.resize(std::min(order.size(), sel.top_k));

    FeatureSelection out;
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto f = order[r];
        out.ranking.push_back({d.feature_names[f], static_cast<int>(r + 1), std::abs(model.w[f])});
        bool drop = false;
        for (auto k : kept) {
            const double c = column_correlation(d, f, k);
            if (std::abs(c) > sel.corr_max) {
                out.pruned.push_back({d.feature_names[f], d.feature_names[k], c});
                drop = true;
                break;
            }
        }
        if (!drop) {
            kept.push_back(f);
            out.selected.push_back(d.feature_names[f]);
        }
    }
    return out;
}

std::string_view to_string(EvalMode m) {
    switch (m) {
        case EvalMode::Full: return "full";
        case EvalMode::AudioOnly: return "audio_only";
        case EvalMode::VideoOnly: return "video_only";
        case EvalMode::TopSelected: return "top_selected";
    }
    return "?";
}

std::optional<EvalMode> parse_eval_mode(std::string_view s) {
    for (auto m : kAllModes) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

ModeReport evaluate_mode(const Dataset& d, EvalMode mode, const SvmOptions& svm, const SelectionOptions& sel,
                         int workers, bool timing) {
    const auto start = std::chrono::steady_clock::now();
    std::set<std::string> audio, video;
    for (const auto& f : dsp::feature_registry()) audio.emplace(f.name);
    for (const auto& f : emotion::video_feature_names()) video.insert(f);

    ModeReport rep;
    rep.mode = mode;
    std::vector<std::string> cols;
    for (const auto& n : d.feature_names) {
        const bool keep = mode == EvalMode::Full || ((mode == EvalMode::AudioOnly || mode == EvalMode::TopSelected) && audio.contains(n)) ||
                          (mode == EvalMode::VideoOnly && video.contains(n));
        if (keep) cols.push_back(n);
    }
    if (cols.empty()) throw Error(ErrorCode::EmptyDataset, "mode " + std::string(to_string(mode)) + " has no feature columns");
    Dataset sub = select_columns(d, cols);
    if (mode == EvalMode::TopSelected) {
        rep.selection = select_features(sub, svm, sel);
        sub = select_columns(sub, rep.selection->selected);
    }
    if (timing) rep.prep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.feature_names = sub.feature_names;
    rep.cv = loo_cv(sub, svm, workers);
    std::vector<double> scores;
    std::vector<SuccessLabel> labels;
    for (const auto& p : rep.cv.predictions) {
        scores.push_back(p.score);
        labels.push_back(p.truth);
    }
    rep.roc = roc_auc(scores, labels);
    return rep;
}

}// namespace mle::predict
