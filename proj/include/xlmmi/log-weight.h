// include/xlmmi/log-weight.h

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

#ifndef XLMMI_LOG_WEIGHT_H_
#define XLMMI_LOG_WEIGHT_H_

#include <cmath>
#include <limits>
#include <utility>

namespace xlmmi {

// Natural-log probability. The semiring zero is -inf, the one is 0.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kLogOne = 0.0;

inline double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double LogMul(double a, double b) {
  if (a == kLogZero || b == kLogZero) return kLogZero;
  return a + b;
}

// Accumulates a log-sum over many terms with a single exp per term;
// used by the forward-backward inner loops.
class LogSumAccumulator {
 public:
  void Add(double x) {
    if (x == kLogZero) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double Value() const {
    return max_ == kLogZero ? kLogZero : max_ + std::log(sum_);
  }

 private:
  double max_ = kLogZero;
  double sum_ = 0.0;
};

}  // namespace xlmmi

#endif  // XLMMI_LOG_WEIGHT_H_
