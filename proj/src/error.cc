// src/error.cc

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

#include "xlmmi/error.h"

namespace xlmmi {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kInvalidGraph: return "InvalidGraph";
    case ErrorKind::kEmptyGraph: return "EmptyGraph";
    case ErrorKind::kCyclicWithoutBound: return "CyclicWithoutBound";
    case ErrorKind::kDuplicateSymbol: return "DuplicateSymbol";
    case ErrorKind::kEmptySymbol: return "EmptySymbol";
    case ErrorKind::kUnknownPhone: return "UnknownPhone";
    case ErrorKind::kMalformedLine: return "MalformedLine";
    case ErrorKind::kOutOfVocabulary: return "OutOfVocabulary";
    case ErrorKind::kUnmappedMissingPhone: return "UnmappedMissingPhone";
    case ErrorKind::kInvalidRemap: return "InvalidRemap";
    case ErrorKind::kEmptyTrainingData: return "EmptyTrainingData";
    case ErrorKind::kInvalidOrder: return "InvalidOrder";
    case ErrorKind::kInvalidParameter: return "InvalidParameter";
    case ErrorKind::kEmptyTranscript: return "EmptyTranscript";
    case ErrorKind::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::kNoAcceptingPath: return "NoAcceptingPath";
    case ErrorKind::kEpsilonCycle: return "EpsilonCycle";
    case ErrorKind::kNumeratorPruned: return "NumeratorPruned";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kInvalidSpec: return "InvalidSpec";
    case ErrorKind::kScenarioMismatch: return "ScenarioMismatch";
    case ErrorKind::kDivergedLoss: return "DivergedLoss";
    case ErrorKind::kIo: return "IoError";
  }
  return "Error";
}

}  // namespace xlmmi
