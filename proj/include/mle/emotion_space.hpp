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

#ifndef MLE_EMOTION_SPACE_HPP
#define MLE_EMOTION_SPACE_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mle::emotion {

inline constexpr std::size_t kEmotionCount = 48;
inline constexpr std::string_view kEmotionMapVersion = "emotion-map/1";

/// Canonical emotion names in the order used by emotions.csv and by
/// EmotionFrame::p.
const std::array<std::string_view, kEmotionCount>& canonical_names();

/// Index of a canonical emotion name, or nullopt if the name is unknown.
std::optional<std::size_t> canonical_index(std::string_view name);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

/// One video frame of detector output. Probabilities are independent
/// per-emotion confidences in canonical order; they are not normalized.
struct EmotionFrame {
    double t = 0.0;
    std::array<double, kEmotionCount> p{};

    bool operator==(const EmotionFrame&) const = default;
};

struct EmotionEntry {
    std::string name;
    double x = 0.0;
    double y = 0.0;
};

/// Fixed mapping from every canonical emotion to a point of the
/// valence (x) / activation (y) plane.
class EmotionMap {
  public:
    /// Built-in coordinates.
    static const EmotionMap& canonical();

    /// Loads a `name,x,y` CSV (header optional). The file must cover every
    /// canonical name exactly once; anything else raises UnknownEmotionName.
    static EmotionMap from_csv(const std::filesystem::path& path);
    static EmotionMap from_entries(std::vector<EmotionEntry> entries);

    /// Entries in canonical order.
    const std::vector<EmotionEntry>& entries() const { return entries_; }
    const EmotionEntry& at(std::string_view name) const;

  private:
    std::vector<EmotionEntry> entries_;
};

struct Cluster {
    std::string name;
    std::vector<std::size_t> members;// canonical indices, ascending
};

/// Named emotion groupings. Membership may overlap between clusters.
class ClusterDefs {
  public:
    static const ClusterDefs& canonical();

    /// Reads {"clusters":[{"name":..., "emotions":[...]} | {"name":..., "union":[...]}]}.
    static ClusterDefs from_json(const std::filesystem::path& path);
    static ClusterDefs from_json_text(std::string_view text);

    const std::vector<Cluster>& clusters() const { return clusters_; }
    const Cluster& at(std::string_view name) const;

  private:
    std::vector<Cluster> clusters_;
};

struct TrajectoryPoint {
    double t_norm = 0.0;
    Vec2 v;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
};

struct PcaResult {
    Vec2 mean;
    std::array<Vec2, 2> components;
    std::array<double, 2> explained_variance{};
};

struct Ellipse {
    Vec2 center;
    std::array<double, 2> semi_axes{};
    double angle = 0.0;
    /// Minor axis has zero length (collinear input).
    bool thin = false;
};

Vec2 emotion_vector(const EmotionFrame& frame, const EmotionMap& map = EmotionMap::canonical());

/// Same as above for probabilities keyed by name; names must be canonical.
Vec2 emotion_vector(const std::map<std::string, double>& probabilities,
                    const EmotionMap& map = EmotionMap::canonical());

Trajectory session_trajectory(std::span<const EmotionFrame> frames,
                              const EmotionMap& map = EmotionMap::canonical());

Vec2 center_of_mass(const Trajectory& trajectory);

PcaResult pca2(const Trajectory& trajectory);

inline constexpr double kDefaultEllipseSigma = 2.0;

Ellipse confidence_ellipse(const Trajectory& trajectory, double k_sigma = kDefaultEllipseSigma);

struct ClusterMass {
    std::string name;
    double mass = 0.0;
};

std::vector<ClusterMass> cluster_occupancy(std::span<const EmotionFrame> frames,
                                           const ClusterDefs& clusters = ClusterDefs::canonical());

/// Names of the per-session video features, in output order.
const std::vector<std::string>& video_feature_names();

/// Session-level summary of the emotion trajectory used by the predictor.
/// Entries that cannot be computed (e.g. PCA of a constant trajectory) are
/// nullopt.
std::vector<std::optional<double>> video_features(std::span<const EmotionFrame> frames,
                                                  const EmotionMap& map = EmotionMap::canonical(),
                                                  const ClusterDefs& clusters = ClusterDefs::canonical());

}// namespace mle::emotion

#endif// MLE_EMOTION_SPACE_HPP
