#ifndef AXIROT_ERROR_HPP
#define AXIROT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace axirot {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateCorrespondence,
  kUndefinedDistance,
  kNonPositiveRadius,
  kInvalidProbability,
  kEmptyInput,
  kNoConsensus,
  kNoPeak,
  kInsufficientPoints,
  kBehindCamera,
  kMalformed,
  kEmptyFile,
  kInvalidConfig,
  kIo,
};

// Every failure raised by the library carries one of the codes above. For
// kMalformed the 1-based line number of the offending row is recorded.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Error(ErrorCode code, std::size_t line, const std::string& what)
      : std::runtime_error(what), code_(code), line_(line) {}

  ErrorCode code() const { return code_; }
  std::size_t line() const { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_ = 0;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateCorrespondence: return "DegenerateCorrespondence";
    case ErrorCode::kUndefinedDistance: return "UndefinedDistance";
    case ErrorCode::kNonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNoConsensus: return "NoConsensus";
    case ErrorCode::kNoPeak: return "NoPeak";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kMalformed: return "Malformed";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace axirot

#endif  // AXIROT_ERROR_HPP
