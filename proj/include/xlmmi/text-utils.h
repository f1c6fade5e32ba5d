// include/xlmmi/text-utils.h

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

#ifndef XLMMI_TEXT_UTILS_H_
#define XLMMI_TEXT_UTILS_H_

#include <string>
#include <string_view>
#include <vector>

namespace xlmmi {

// Splits on runs of spaces, tabs and carriage returns.
std::vector<std::string_view> SplitWhitespace(std::string_view line);

// Splits on every occurrence of `sep`; empty fields are kept.
std::vector<std::string_view> Split(std::string_view s, char sep);

// Lines without their '\n'; a trailing '\r' is stripped.
std::vector<std::string_view> SplitLines(std::string_view text);

std::string_view StripWhitespace(std::string_view s);

// Throws Error(kIo) naming the path on failure.
std::string ReadFile(const std::string &path);

// Writes to `path`.tmp then renames over `path`.
void WriteFileAtomic(const std::string &path, std::string_view contents);

}  // namespace xlmmi

#endif  // XLMMI_TEXT_UTILS_H_
