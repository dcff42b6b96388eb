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

#ifndef MLE_TESTS_FIXTURES_HPP
#define MLE_TESTS_FIXTURES_HPP

#include <mle/session_store.hpp>
#include <mle/synth.hpp>

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace fixture {

// Directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("mle_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

// A 2 s session with every stream present.
inline mle::store::Session complete_session(const std::string& id = "P001_S1", int scenario = 1) {
    using mle::store::ImpactValue;
    mle::store::Session s;
    s.session_id = id;
    s.participant_id = id.substr(0, id.find('_'));
    s.scenario_id = scenario;
    s.duration = 2.0;
    s.participant_audio = mle::synth::sine(220.0, 2.0, 16000, 0.3);
    s.inhabiter_audio = mle::synth::sine(150.0, 2.0, 16000, 0.2);
    s.emotion_fps = 5.0;
    std::vector<mle::emotion::EmotionFrame> frames;
    for (int k = 0; k < 10; ++k) {
        mle::emotion::EmotionFrame f;
        f.t = k * 0.2;
        f.p[static_cast<std::size_t>(k % 3)] = 0.5;
        f.p[10] = 0.25;
        frames.push_back(f);
    }
    s.emotion_frames = frames;
    s.impact_events = mle::store::EventStream{{{0.0, ImpactValue::Positive}, {1.25, ImpactValue::Negative}}};
    s.eoi_events = mle::store::EventStream{{{0.5, ImpactValue::EoiPositive}}};
    s.self_events = mle::store::EventStream{{{0.25, ImpactValue::Neutral}, {1.0, ImpactValue::Positive}}};
    s.survey = mle::store::SurveyResponses{8.0, 7.0, 6.0, 7.0};
    return s;
}

}// namespace fixture

#endif// MLE_TESTS_FIXTURES_HPP
