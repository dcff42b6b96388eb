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

#include <mle/emotion_space.hpp>
#include <mle/error.hpp>
#include <mle/text_util.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace mle::emotion {

namespace {

struct BuiltinEntry {
    std::string_view name;
    double x;
    double y;
};

// Circumplex coordinates, canonical order.
constexpr std::array<BuiltinEntry, kEmotionCount> kBuiltinMap{{
    {"Admiration", 0.05, 0.85},
    {"Adoration", 0.05, 0.9},
    {"Aesthetic Appreciation", 0.2, 0.1},
    {"Amusement", 0.55, 0.2},
    {"Anger", -0.4, 0.8},
    {"Anxiety", -0.73, -0.8},
    {"Awe", 0.05, 0.95},
    {"Awkwardness", -0.68, -0.38},
    {"Boredom", -0.32, -0.8},
    {"Calmness", 0.75, -0.7},
    {"Concentration", 0.1, -0.1},
    {"Contemplation", 0.6, -0.4},
    {"Confusion", -0.6, 0.4},
    {"Contempt", -0.575, 0.675},
    {"Contentment", 0.82, -0.58},
    {"Craving", 0.22, 0.75},
    {"Determination", 0.75, 0.25},
    {"Disappointment", -0.8, -0.1},
    {"Disgust", -0.675, 0.5},
    {"Distress", -0.6, -0.175},
    {"Doubt", -0.28, -0.95},
    {"Ecstasy", 0.65, 0.7},
    {"Embarrassment", -0.32, -0.6},
    {"Empathic Pain", 0.38, -0.82},
    {"Entrancement", 0.3, -0.6},
    {"Envy", -0.28, 0.82},
    {"Excitement", 0.5, 0.35},
    {"Fear", -0.12, 0.78},
    {"Guilt", -0.4, -0.42},
    {"Horror", -0.08, 0.78},
    {"Interest", 0.65, 0.05},
    {"Joy", 0.95, 0.115},
    {"Love", 0.95, 0.175},
    {"Nostalgia", 0.22, -0.43},
    {"Pain", -0.95, -0.5},
    {"Pride", 0.42, 0.65},
    {"Realization", 0.42, 0.62},
    {"Relief", 0.78, -0.6},
    {"Romance", 0.85, -0.125},
    {"Sadness", -0.8, -0.4},
    {"Satisfaction", 0.8, -0.65},
    {"Sexual Desire", 0.22, 0.85},
    {"Shame", -0.42, -0.5},
    {"Surprise (positive)", 0.42, 0.88},
    {"Surprise (negative)", -0.42, 0.88},
    {"Sympathy", 0.38, -0.92},
    {"Tiredness", 0.02, -0.99},
    {"Triumph", 0.65, 0.8},
}};

constexpr std::string_view kBuiltinClusters = R"json({
  "version": "clusters/1",
  "clusters": [
    {"name": "Active-Positive", "emotions": ["Amusement", "Craving", "Determination", "Ecstasy", "Excitement", "Joy", "Love", "Pride", "Satisfaction", "Sexual Desire", "Surprise (positive)", "Triumph", "Interest", "Realization"]},
    {"name": "Active-Negative", "emotions": ["Anger", "Contempt", "Disgust", "Distress", "Confusion", "Embarrassment", "Empathic Pain", "Fear", "Horror", "Pain", "Envy", "Guilt", "Surprise (negative)"]},
    {"name": "Passive-Positive", "emotions": ["Admiration", "Adoration", "Aesthetic Appreciation", "Awe", "Contentment", "Entrancement", "Nostalgia", "Relief", "Romance", "Sympathy"]},
    {"name": "Strongest-Passive-Positive", "emotions": ["Calmness", "Contemplation", "Concentration"]},
    {"name": "Passive-Negative", "emotions": ["Anxiety", "Awkwardness", "Boredom", "Disappointment", "Doubt", "Sadness", "Shame", "Tiredness"]},
    {"name": "Engaged-Positive", "emotions": ["Determination", "Excitement", "Joy", "Satisfaction", "Surprise (positive)", "Interest", "Realization"]},
    {"name": "Engaged-Negative", "emotions": ["Disappointment", "Surprise (negative)", "Anger", "Sadness"]},
    {"name": "Engaged", "union": ["Engaged-Positive", "Engaged-Negative"]}
  ]
})json";

std::size_t require_index(std::string_view name) {
    auto idx = canonical_index(name);
    if (!idx) throw Error(ErrorCode::UnknownEmotionName, "unknown emotion name '" + std::string(name) + "'");
    return *idx;
}

struct Moments {
    Vec2 mean;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
};

Moments sample_moments(const Trajectory& tr) {
    const auto n = tr.points.size();
    Moments m;
    for (const auto& p : tr.points) {
        m.mean.x += p.v.x;
        m.mean.y += p.v.y;
    }
    m.mean.x /= static_cast<double>(n);
    m.mean.y /= static_cast<double>(n);
    for (const auto& p : tr.points) {
        const double dx = p.v.x - m.mean.x;
        const double dy = p.v.y - m.mean.y;
        m.sxx += dx * dx;
        m.sxy += dx * dy;
        m.syy += dy * dy;
    }
    const double denom = static_cast<double>(n - 1);
    m.sxx /= denom;
    m.sxy /= denom;
    m.syy /= denom;
    return m;
}

// Flip so the larger-magnitude coordinate is positive (x wins ties).
Vec2 fix_sign(Vec2 v) {
    const double dominant = std::abs(v.x) >= std::abs(v.y) ? v.x : v.y;
    if (dominant < 0.0) {
        v.x = -v.x;
        v.y = -v.y;
    }
    // Avoid printing -0.
    if (v.x == 0.0) v.x = 0.0;
    if (v.y == 0.0) v.y = 0.0;
    return v;
}

void require_spread(const Trajectory& tr) {
    if (tr.points.size() < 2) throw Error(ErrorCode::DegenerateInput, "PCA needs at least two points");
    const Vec2 first = tr.points.front().v;
    const bool all_same = std::all_of(tr.points.begin(), tr.points.end(),
                                      [&](const TrajectoryPoint& p) { return p.v == first; });
    if (all_same) throw Error(ErrorCode::DegenerateInput, "all trajectory points are identical");
}

}// namespace

const std::array<std::string_view, kEmotionCount>& canonical_names() {
    static const auto names = [] {
        std::array<std::string_view, kEmotionCount> out{};
        for (std::size_t i = 0; i < kEmotionCount; ++i) out[i] = kBuiltinMap[i].name;
        return out;
    }();
    return names;
}

std::optional<std::size_t> canonical_index(std::string_view name) {
    const auto& names = canonical_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    return std::nullopt;
}

const EmotionMap& EmotionMap::canonical() {
    static const EmotionMap map = [] {
        std::vector<EmotionEntry> entries;
        entries.reserve(kEmotionCount);
        for (const auto& e : kBuiltinMap) entries.push_back({std::string(e.name), e.x, e.y});
        return from_entries(std::move(entries));
    }();
    return map;
}

EmotionMap EmotionMap::from_entries(std::vector<EmotionEntry> entries) {
    std::vector<std::optional<EmotionEntry>> slots(kEmotionCount);
    for (auto& e : entries) {
        const auto idx = require_index(e.name);
        if (slots[idx]) throw Error(ErrorCode::UnknownEmotionName, "emotion '" + e.name + "' listed twice");
        slots[idx] = std::move(e);
    }
    EmotionMap map;
    map.entries_.reserve(kEmotionCount);
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        if (!slots[i]) {
            throw Error(ErrorCode::UnknownEmotionName,
                        "emotion map lacks '" + std::string(canonical_names()[i]) + "'");
        }
        map.entries_.push_back(std::move(*slots[i]));
    }
    return map;
}

EmotionMap EmotionMap::from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open emotion map " + path.string());
    std::vector<EmotionEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = std::string(text::trim(line));
        if (line.empty()) continue;
        const auto cells = text::split(line, ',');
        if (cells.size() != 3) throw MalformedStream(path.string(), line_no, "expected name,x,y");
        if (line_no == 1 && text::trim(cells[0]) == "name") continue;
        const auto x = text::parse_double(cells[1]);
        const auto y = text::parse_double(cells[2]);
        if (!x || !y) throw MalformedStream(path.string(), line_no, "coordinates are not numbers");
        entries.push_back({std::string(text::trim(cells[0])), *x, *y});
    }
    return from_entries(std::move(entries));
}

const EmotionEntry& EmotionMap::at(std::string_view name) const { return entries_[require_index(name)]; }

const ClusterDefs& ClusterDefs::canonical() {
    static const ClusterDefs defs = from_json_text(kBuiltinClusters);
    return defs;
}

ClusterDefs ClusterDefs::from_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open cluster file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

ClusterDefs ClusterDefs::from_json_text(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedStream("clusters", 0, e.what());
    }
    ClusterDefs defs;
    try {
        for (const auto& c : doc.at("clusters")) {
            Cluster cluster;
            cluster.name = c.at("name").get<std::string>();
            std::set<std::size_t> members;
            if (c.contains("union")) {
                for (const auto& part : c.at("union")) {
                    const auto& source = defs.at(part.get<std::string>());
                    members.insert(source.members.begin(), source.members.end());
                }
            } else {
                for (const auto& name : c.at("emotions")) members.insert(require_index(name.get<std::string>()));
            }
            cluster.members.assign(members.begin(), members.end());
            defs.clusters_.push_back(std::move(cluster));
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedStream("clusters", 0, e.what());
    }
    return defs;
}

const Cluster& ClusterDefs::at(std::string_view name) const {
    for (const auto& c : clusters_) {
        if (c.name == name) return c;
    }
    throw Error(ErrorCode::UnknownEmotionName, "unknown cluster '" + std::string(name) + "'");
}

Vec2 emotion_vector(const EmotionFrame& frame, const EmotionMap& map) {
    Vec2 v;
    const auto& entries = map.entries();
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        v.x += frame.p[i] * entries[i].x;
        v.y += frame.p[i] * entries[i].y;
    }
    return v;
}

Vec2 emotion_vector(const std::map<std::string, double>& probabilities, const EmotionMap& map) {
    EmotionFrame frame;
    for (const auto& [name, p] : probabilities) frame.p[require_index(name)] = p;
    return emotion_vector(frame, map);
}

Trajectory session_trajectory(std::span<const EmotionFrame> frames, const EmotionMap& map) {
    if (frames.empty()) throw Error(ErrorCode::EmptyInput, "trajectory needs at least one frame");
    Trajectory tr;
    tr.points.reserve(frames.size());
    const double t_first = frames.front().t;
    const double span = frames.back().t - t_first;
    for (const auto& f : frames) {
        const double t_norm = span > 0.0 ? (f.t - t_first) / span : 0.0;
        tr.points.push_back({t_norm, emotion_vector(f, map)});
    }
    return tr;
}

Vec2 center_of_mass(const Trajectory& trajectory) {
    if (trajectory.points.empty()) throw Error(ErrorCode::EmptyInput, "center of mass of an empty trajectory");
    Vec2 c;
    for (const auto& p : trajectory.points) {
        c.x += p.v.x;
        c.y += p.v.y;
    }
    const auto n = static_cast<double>(trajectory.points.size());
    return {c.x / n, c.y / n};
}

PcaResult pca2(const Trajectory& trajectory) {
    require_spread(trajectory);
    const Moments m = sample_moments(trajectory);

    // Closed-form eigen-decomposition of the symmetric 2x2 covariance.
    const double half_trace = 0.5 * (m.sxx + m.syy);
    const double radius = std::hypot(0.5 * (m.sxx - m.syy), m.sxy);
    const double theta = 0.5 * std::atan2(2.0 * m.sxy, m.sxx - m.syy);

    PcaResult out;
    out.mean = m.mean;
    out.components[0] = fix_sign({std::cos(theta), std::sin(theta)});
    out.components[1] = fix_sign({-std::sin(theta), std::cos(theta)});
    out.explained_variance[0] = half_trace + radius;
    out.explained_variance[1] = std::max(0.0, half_trace - radius);
    return out;
}

Ellipse confidence_ellipse(const Trajectory& trajectory, double k_sigma) {
    if (!(k_sigma > 0.0)) throw Error(ErrorCode::OutOfRange, "k_sigma must be positive");
    const PcaResult pca = pca2(trajectory);
    Ellipse e;
    e.center = center_of_mass(trajectory);
    e.semi_axes[0] = k_sigma * std::sqrt(pca.explained_variance[0]);
    e.semi_axes[1] = k_sigma * std::sqrt(pca.explained_variance[1]);
    e.angle = std::atan2(pca.components[0].y, pca.components[0].x);
    e.thin = pca.explained_variance[1] <= 1e-15 * pca.explained_variance[0];
    if (e.thin) e.semi_axes[1] = 0.0;
    return e;
}

std::vector<ClusterMass> cluster_occupancy(std::span<const EmotionFrame> frames, const ClusterDefs& clusters) {
    if (frames.empty()) throw Error(ErrorCode::EmptyInput, "cluster occupancy needs at least one frame");
    std::vector<ClusterMass> out;
    out.reserve(clusters.clusters().size());
    for (const auto& c : clusters.clusters()) {
        double total = 0.0;
        for (const auto& f : frames) {
            double frame_mass = 0.0;
            for (auto idx : c.members) frame_mass += f.p[idx];
            total += frame_mass;
        }
        out.push_back({c.name, total / static_cast<double>(frames.size())});
    }
    return out;
}

const std::vector<std::string>& video_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {
            "emo_com_x",        "emo_com_y",        "emo_pca_var1",   "emo_pca_var2",
            "emo_ellipse_major", "emo_ellipse_minor", "emo_spread",     "emo_drift_x",
            "emo_drift_y",
        };
        for (const auto& c : ClusterDefs::canonical().clusters()) {
            std::string key = "emo_cluster_";
            for (char ch : c.name) key += ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            n.push_back(key);
        }
        return n;
    }();
    return names;
}

std::vector<std::optional<double>> video_features(std::span<const EmotionFrame> frames, const EmotionMap& map,
                                                  const ClusterDefs& clusters) {
    std::vector<std::optional<double>> out(video_feature_names().size());
    if (frames.empty()) return out;

    const Trajectory tr = session_trajectory(frames, map);
    const Vec2 com = center_of_mass(tr);
    out[0] = com.x;
    out[1] = com.y;
    try {
        const PcaResult pca = pca2(tr);
        const Ellipse ell = confidence_ellipse(tr);
        out[2] = pca.explained_variance[0];
        out[3] = pca.explained_variance[1];
        out[4] = ell.semi_axes[0];
        out[5] = ell.semi_axes[1];
    } catch (const Error&) {
        // constant trajectory: spread statistics stay absent
    }
    double spread = 0.0;
    for (const auto& p : tr.points) spread += std::hypot(p.v.x - com.x, p.v.y - com.y);
    out[6] = spread / static_cast<double>(tr.points.size());

    // Drift: centroid of the last third minus centroid of the first third.
    const std::size_t third = std::max<std::size_t>(1, tr.points.size() / 3);
    Vec2 head;
    Vec2 tail;
    for (std::size_t i = 0; i < third; ++i) {
        head.x += tr.points[i].v.x;
        head.y += tr.points[i].v.y;
        tail.x += tr.points[tr.points.size() - 1 - i].v.x;
        tail.y += tr.points[tr.points.size() - 1 - i].v.y;
    }
    out[7] = (tail.x - head.x) / static_cast<double>(third);
    out[8] = (tail.y - head.y) / static_cast<double>(third);

    const auto masses = cluster_occupancy(frames, clusters);
    for (std::size_t i = 0; i < masses.size() && 9 + i < out.size(); ++i) out[9 + i] = masses[i].mass;
    return out;
}

}// namespace mle::emotion
