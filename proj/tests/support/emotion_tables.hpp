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

// Reference emotion coordinates and cluster memberships, typed in
// separately from the library's built-in tables.

#ifndef MLE_TESTS_EMOTION_TABLES_HPP
#define MLE_TESTS_EMOTION_TABLES_HPP

#include <string_view>
#include <vector>

namespace tables {

struct Coordinate {
    std::string_view name;
    double x;
    double y;
};

inline constexpr Coordinate kCoordinates[] = {
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
    {"Confusion", -0.6, 0.4},
    {"Contemplation", 0.6, -0.4},
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
    {"Surprise (negative)", -0.42, 0.88},
    {"Surprise (positive)", 0.42, 0.88},
    {"Sympathy", 0.38, -0.92},
    {"Tiredness", 0.02, -0.99},
    {"Triumph", 0.65, 0.8},
};

struct ClusterRow {
    std::string_view name;
    std::vector<std::string_view> members;
};

inline const ClusterRow kClusters[] = {
    {"Active-Positive", {"Amusement", "Craving", "Determination", "Ecstasy", "Excitement", "Joy", "Love", "Pride", "Satisfaction", "Sexual Desire", "Surprise (positive)", "Triumph", "Interest", "Realization"}},
    {"Active-Negative", {"Anger", "Contempt", "Disgust", "Distress", "Confusion", "Embarrassment", "Empathic Pain", "Fear", "Horror", "Pain", "Envy", "Guilt", "Surprise (negative)"}},
    {"Passive-Positive", {"Admiration", "Adoration", "Aesthetic Appreciation", "Awe", "Contentment", "Entrancement", "Nostalgia", "Relief", "Romance", "Sympathy"}},
    {"Strongest-Passive-Positive", {"Calmness", "Contemplation", "Concentration"}},
    {"Passive-Negative", {"Anxiety", "Awkwardness", "Boredom", "Disappointment", "Doubt", "Sadness", "Shame", "Tiredness"}},
    {"Engaged-Positive", {"Determination", "Excitement", "Joy", "Satisfaction", "Surprise (positive)", "Interest", "Realization"}},
    {"Engaged-Negative", {"Disappointment", "Surprise (negative)", "Anger", "Sadness"}},
    {"Engaged", {"Determination", "Excitement", "Joy", "Satisfaction", "Surprise (positive)", "Interest", "Realization", "Disappointment", "Surprise (negative)", "Anger", "Sadness"}},
};

}// namespace tables

#endif// MLE_TESTS_EMOTION_TABLES_HPP
