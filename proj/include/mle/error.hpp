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

#ifndef MLE_ERROR_HPP
#define MLE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mle {

enum class ErrorCode {
    MissingManifest,
    MalformedStream,
    RateOutOfRange,
    NonMonotonicTimestamps,
    UnusableSession,
    EmptySeries,
    OutOfRange,
    UnknownEmotionName,
    EmptyInput,
    DegenerateInput,
    EmptyAudio,
    TooFewPeriods,
    NoVoicedContent,
    MissingFormant,
    SingleClass,
    EmptyDataset,
    ConstantInput,
    LengthMismatch,
    ZeroMargin,
    NoCompleteParticipants,
    IoFailure,
    BadArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code; the
/// CLI maps codes to exit statuses and to the error JSON it prints on stderr.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

/// Parse failure inside a bundle file. `line` is 1-based; 0 means the whole file.
class MalformedStream : public Error {
  public:
    MalformedStream(std::string file, std::size_t line, const std::string& what);

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

}// namespace mle

#endif// MLE_ERROR_HPP
