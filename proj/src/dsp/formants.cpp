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

#include "dsp_internal.hpp"

#include <mle/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mle::dsp {

namespace {

// Relative white-noise floor added to r[0]; keeps the normal equations
// well conditioned for near-line spectra such as a pure tone.
constexpr double kNoiseFloor = 1e-6;

std::vector<double> levinson(std::span<const double> r, std::size_t order) {
    std::vector<double> a(order + 1, 0.0);
    a[0] = 1.0;
    double err = r[0];
    for (std::size_t i = 1; i <= order; ++i) {
        if (err <= 0.0) break;
        double acc = r[i];
        for (std::size_t j = 1; j < i; ++j) acc += a[j] * r[i - j];
        const double k = -acc / err;
        std::vector<double> prev(a);
        for (std::size_t j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
        a[i] = k;
        err *= 1.0 - k * k;
    }
    return a;
}

}// namespace

FormantWindow lpc_formants(std::span<const double> x_in, double sample_rate, const DspConfig& cfg) {
    FormantWindow out;
    const double fs = 2.0 * cfg.formant_ceiling_hz;
    std::vector<double> x = sample_rate == fs ? std::vector<double>(x_in.begin(), x_in.end())
                                              : resample(x_in, sample_rate, fs);
    const auto order = static_cast<std::size_t>(2 + std::lround(fs / 1000.0));
    const auto n = x.size();
    if (n <= order) return out;

    const double alpha = std::exp(-2.0 * std::numbers::pi * 50.0 / fs);
    for (std::size_t i = n - 1; i >= 1; --i) x[i] -= alpha * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) {
        x[i] *= 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    }

    std::vector<double> r(order + 1, 0.0);
    for (std::size_t lag = 0; lag <= order; ++lag) {
        for (std::size_t i = lag; i < n; ++i) r[lag] += x[i] * x[i - lag];
    }
    if (!(r[0] > 0.0)) return out;
    r[0] *= 1.0 + kNoiseFloor;
    const auto a = levinson(r, order);

    // Roots of z^p + a1 z^(p-1) + ... + ap via the companion matrix.
    const auto p = static_cast<Eigen::Index>(order);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = -a[static_cast<std::size_t>(j) + 1];
    for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);

    std::vector<std::pair<double, double>> found;// (frequency, bandwidth)
    for (const auto& z : solver.eigenvalues()) {
        if (z.imag() <= 0.0) continue;
        const double f = std::arg(z) * fs / (2.0 * std::numbers::pi);
        const double bw = -std::log(std::abs(z)) * fs / std::numbers::pi;
        if (f >= cfg.formant_floor_hz && f < cfg.formant_ceiling_hz && bw > 0.0 && bw < cfg.formant_max_bandwidth_hz) {
            found.emplace_back(f, bw);
        }
    }
    std::sort(found.begin(), found.end());
    for (std::size_t i = 0; i < found.size() && i < 4; ++i) {
        out.frequencies.push_back(found[i].first);
        out.bandwidths.push_back(found[i].second);
    }
    return out;
}

FormantSummary formants(const AudioTrack& track, const DspConfig& cfg) {
    const auto pitch = f0_track(track, cfg);
    const auto spans = detail::analysis_windows(track.samples.size(), track.sample_rate, cfg.window_s);
    FormantSummary out;
    for (std::size_t i = 0; i < pitch.windows.size() && i < spans.size(); ++i) {
        if (!pitch.windows[i].f0) continue;
        const std::span<const double> win(track.samples.data() + spans[i].begin, spans[i].end - spans[i].begin);
        auto fw = lpc_formants(win, track.sample_rate, cfg);
        fw.t = pitch.windows[i].t;
        out.windows.push_back(std::move(fw));
    }
    if (out.windows.empty()) throw Error(ErrorCode::NoVoicedContent, "no voiced window for formant analysis");

    for (std::size_t k = 0; k < 4; ++k) {
        std::vector<double> f, bw;
        for (const auto& w : out.windows) {
            if (w.frequencies.size() > k) {
                f.push_back(w.frequencies[k]);
                bw.push_back(w.bandwidths[k]);
            }
        }
        if (f.empty()) continue;
        out.mean[k] = detail::mean(f);
        out.median[k] = detail::median(f);
        out.stddev[k] = detail::population_sd(f);
        out.bandwidth[k] = detail::mean(bw);
    }
    return out;
}

DerivedFormants derived_formant_features(const std::array<std::optional<double>, 4>& fm, std::optional<double> f0_mean_hz) {
    for (std::size_t i = 0; i < 4; ++i) {
        if (!fm[i]) throw Error(ErrorCode::MissingFormant, "F" + std::to_string(i + 1) + " is absent");
        if (i > 0 && !(*fm[i] > *fm[i - 1])) {
            throw Error(ErrorCode::MissingFormant, "formants are not strictly increasing");
        }
    }
    DerivedFormants d;
    d.average_hz = (*fm[0] + *fm[1] + *fm[2] + *fm[3]) / 4.0;
    d.dispersion_hz = (*fm[3] - *fm[0]) / 3.0;
    // Least squares through the origin on the odd quarter-wave multiples.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double m = (2.0 * static_cast<double>(i) + 1.0) / 2.0;
        num += m * *fm[i];
        den += m * m;
    }
    d.spacing_hz = num / den;
    d.vocal_tract_length_cm = kSpeedOfSoundCm / (2.0 * d.spacing_hz);
    if (f0_mean_hz) d.gpr_vtl_interaction = *f0_mean_hz * d.vocal_tract_length_cm;
    return d;
}

}// namespace mle::dsp
