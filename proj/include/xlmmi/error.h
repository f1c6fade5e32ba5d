// include/xlmmi/error.h

// Copyright 2026  The xlmmi Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef XLMMI_ERROR_H_
#define XLMMI_ERROR_H_

#include <stdexcept>
#include <string>

namespace xlmmi {

enum class ErrorKind {
  kParse,
  kInvalidGraph,
  kEmptyGraph,
  kCyclicWithoutBound,
  kDuplicateSymbol,
  kEmptySymbol,
  kUnknownPhone,
  kMalformedLine,
  kOutOfVocabulary,
  kUnmappedMissingPhone,
  kInvalidRemap,
  kEmptyTrainingData,
  kInvalidOrder,
  kInvalidParameter,
  kEmptyTranscript,
  kLabelOutOfRange,
  kNoAcceptingPath,
  kEpsilonCycle,
  kNumeratorPruned,
  kShapeMismatch,
  kLengthMismatch,
  kInvalidSpec,
  kScenarioMismatch,
  kDivergedLoss,
  kIo,
};

const char *ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception; `kind` lets
// callers (CLI exit codes, training loops skipping pruned utterances)
// branch without parsing messages.
// what() is "<KindName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &detail)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + detail),
        kind_(kind),
        detail_(detail) {}
  ErrorKind kind() const { return kind_; }
  const std::string &detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string &detail) {
  throw Error(kind, detail);
}

// Rethrows `e` with `context` (a path, a line) in front of its detail.
[[noreturn]] inline void FailWithContext(const Error &e, const std::string &context) {
  throw Error(e.kind(), context + ": " + e.detail());
}

}  // namespace xlmmi

#endif  // XLMMI_ERROR_H_
