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

namespace mle {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingManifest: return "MissingManifest";
        case ErrorCode::MalformedStream: return "MalformedStream";
        case ErrorCode::RateOutOfRange: return "RateOutOfRange";
        case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
        case ErrorCode::UnusableSession: return "UnusableSession";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::UnknownEmotionName: return "UnknownEmotionName";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::EmptyAudio: return "EmptyAudio";
        case ErrorCode::TooFewPeriods: return "TooFewPeriods";
        case ErrorCode::NoVoicedContent: return "NoVoicedContent";
        case ErrorCode::MissingFormant: return "MissingFormant";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::ConstantInput: return "ConstantInput";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroMargin: return "ZeroMargin";
        case ErrorCode::NoCompleteParticipants: return "NoCompleteParticipants";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::BadArgument: return "BadArgument";
    }
    return "Unknown";
}

MalformedStream::MalformedStream(std::string file, std::size_t line, const std::string& what)
    : Error(ErrorCode::MalformedStream,
            file + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + what),
      file_(std::move(file)), line_(line) {}

}// namespace mle
