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

#ifndef MLE_PREDICTOR_HPP
#define MLE_PREDICTOR_HPP

#include <mle/impact_metrics.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mle::predict {

using metrics::SuccessLabel;

/// +1 for Successful, -1 for Unsuccessful.
int sign(SuccessLabel y);

struct Row {
    std::string session_id;
    std::vector<double> x;
    SuccessLabel y = SuccessLabel::Unsuccessful;
};

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<Row> rows;

    std::size_t positives() const;
    std::size_t negatives() const;
};

/// Features table as written by the `features` command: a session_id column
/// followed by named feature columns, "NA" for absent values.
struct FeatureTable {
    std::vector<std::string> feature_names;
    std::vector<std::string> session_ids;
    std::vector<std::vector<std::optional<double>>> values;
};

FeatureTable read_feature_table(const std::filesystem::path& path);
FeatureTable parse_feature_table(const std::string& text, const std::string& name);
std::string format_feature_table(const FeatureTable& table);

/// Labels CSV: session_id,success with success in {1, 0, successful,
/// unsuccessful}.
std::map<std::string, SuccessLabel> read_labels(const std::filesystem::path& path);
std::map<std::string, SuccessLabel> parse_labels(const std::string& text, const std::string& name);
std::string format_labels(const std::map<std::string, SuccessLabel>& labels);

struct DropLog {
    std::vector<std::string> absent_features;// rows with absent values
    std::vector<std::string> unlabeled;      // rows without a label
};

/// Joins features with labels. Rows with any absent value or without a label
/// are dropped and listed in `log`. Row order follows the table.
Dataset build_dataset(const FeatureTable& table, const std::map<std::string, SuccessLabel>& labels,
                      DropLog* log = nullptr);

/// Dataset restricted to the named columns, in the given order.
Dataset select_columns(const Dataset& d, std::span<const std::string> names);

struct Scaler {
    std::vector<double> mean;
    std::vector<double> scale;// population sd; 1 for constant columns

    static Scaler fit(const Dataset& d);
    std::vector<double> apply(std::span<const double> x) const;
};

struct SvmOptions {
    double C = 1.0;
    double tolerance = 1e-8;// maximal KKT violation at exit
    long max_iterations = 10'000'000;
};

struct SvmModel {
    std::vector<std::string> feature_names;
    std::vector<double> w;// on standardized features
    double b = 0.0;
    double C = 1.0;
    Scaler scaler;
    long iterations = 0;

    double decision(std::span<const double> raw_x) const;
    SuccessLabel predict(std::span<const double> raw_x) const;
};

/// Soft-margin linear SVM fitted by SMO on the dual with maximal-violating
/// pair selection. Ties between candidates go to the lowest row index, so the
/// fit is deterministic for a given row order.
SvmModel train_linear_svm(const Dataset& d, const SvmOptions& opt = {});

struct Prediction {
    std::string session_id;
    SuccessLabel truth = SuccessLabel::Unsuccessful;
    double score = 0.0;
    SuccessLabel predicted = SuccessLabel::Unsuccessful;
};

struct Confusion {
    int tp = 0;
    int fp = 0;
    int tn = 0;
    int fn = 0;
};

struct CvResult {
    std::vector<Prediction> predictions;  // dataset row order
    std::vector<std::string> skipped;     // folds whose training split had one class
    double accuracy = 0.0;
    Confusion confusion;
};

/// Leave-one-out cross-validation. Standardization is refitted in every fold.
/// Folds run on up to `workers` threads; results keep row order.
CvResult loo_cv(const Dataset& d, const SvmOptions& opt = {}, int workers = 1);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Threshold sweep over the distinct scores, highest first. Ties move both
/// coordinates at once, so the trapezoid area counts them as half-concordant.
RocCurve roc_auc(std::span<const double> scores, std::span<const SuccessLabel> labels);

struct RankedFeature {
    std::string name;
    int rank = 0;// 1 = largest |w|
    double abs_weight = 0.0;
};

struct PrunedFeature {
    std::string name;
    std::string partner;// higher-ranked feature it correlated with
    double corr = 0.0;
};

struct FeatureSelection {
    std::vector<std::string> selected;// rank order
    std::vector<RankedFeature> ranking;// top_k entries
    std::vector<PrunedFeature> pruned;
};

struct SelectionOptions {
    std::size_t top_k = 20;
    double corr_max = 0.9;
};

/// Pearson correlation of two columns; 0 when either column is constant.
double column_correlation(const Dataset& d, std::size_t a, std::size_t b);

FeatureSelection select_features(const Dataset& d, const SvmOptions& svm = {}, const SelectionOptions& sel = {});

enum class EvalMode { Full, AudioOnly, VideoOnly, TopSelected };

std::string_view to_string(EvalMode m);
std::optional<EvalMode> parse_eval_mode(std::string_view s);
inline constexpr EvalMode kAllModes[] = {EvalMode::Full, EvalMode::AudioOnly, EvalMode::VideoOnly,
                                         EvalMode::TopSelected};

struct ModeReport {
    EvalMode mode = EvalMode::Full;
    std::vector<std::string> feature_names;
    std::optional<FeatureSelection> selection;// TopSelected only
    CvResult cv;
    RocCurve roc;
    std::optional<double> prep_seconds;// wall time of column preparation and selection
};

/// Audio columns are the registry names, video columns the emotion-space
/// names; other columns only enter Full. TopSelected runs select_features on
/// the audio columns. Modes with no columns raise EmptyDataset.
ModeReport evaluate_mode(const Dataset& d, EvalMode mode, const SvmOptions& svm = {}, const SelectionOptions& sel = {},
                         int workers = 1, bool timing = false);

}// namespace mle::predict

#endif// MLE_PREDICTOR_HPP
