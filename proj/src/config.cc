// src/config.cc

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

#include "xlmmi/config.h"

#include <charconv>

#include "xlmmi/error.h"
#include "xlmmi/text-utils.h"
#include "xlmmi/wfsa.h"

namespace xlmmi {

namespace {

[[noreturn]] void BadValue(const std::string &key, const std::string &value,
                           const char *expected) {
  Fail(ErrorKind::kInvalidSpec, "key '" + key + "': expected " + expected + ", got '" + value + "'");
}

template <typename T>
bool ParseInteger(std::string_view s, T *out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::string_view text) {
  KeyValueConfig config;
  std::string section;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); i++) {
    std::string_view line = lines[i];
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = StripWhitespace(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string &msg) {
      Fail(ErrorKind::kParse, "line " + std::to_string(i + 1) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail("malformed section header");
      section = std::string(StripWhitespace(line.substr(1, line.size() - 2)));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    std::string key(StripWhitespace(line.substr(0, eq)));
    std::string value(StripWhitespace(line.substr(eq + 1)));
    if (SplitWhitespace(key).size() != 1)
      fail("malformed key");
    if (!section.empty()) key = section + "." + key;
    if (config.values_.count(key)) fail("duplicate key '" + key + "'");
    config.values_[key] = value;
  }
  return config;
}

const std::string *KeyValueConfig::Lookup(const std::string &key) const {
  used_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string KeyValueConfig::GetString(const std::string &key, const std::string &fallback) const {
  const std::string *v = Lookup(key);
  return v ? *v : fallback;
}

int64_t KeyValueConfig::GetInt(const std::string &key, int64_t fallback) const {
  const std::string *v = Lookup(key);
  if (!v) return fallback;
  int64_t out;
  if (!ParseInteger(*v, &out)) BadValue(key, *v, "an integer");
  return out;
}

uint64_t KeyValueConfig::GetUint(const std::string &key, uint64_t fallback) const {
  const std::string *v = Lookup(key);
  if (!v) return fallback;
  uint64_t out;
  if (!ParseInteger(*v, &out)) BadValue(key, *v, "a non-negative integer");
  return out;
}

double KeyValueConfig::GetDouble(const std::string &key, double fallback) const {
  const std::string *v = Lookup(key);
  if (!v) return fallback;
  auto d = ParseDouble(*v);
  if (!d) BadValue(key, *v, "a number");
  return *d;
}

bool KeyValueConfig::GetBool(const std::string &key, bool fallback) const {
  const std::string *v = Lookup(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  BadValue(key, *v, "true or false");
}

std::vector<int64_t> KeyValueConfig::GetIntList(const std::string &key,
                                                std::vector<int64_t> fallback) const {
  const std::string *v = Lookup(key);
  if (!v) return fallback;
  std::vector<int64_t> out;
  for (auto field : Split(*v, ',')) {
    int64_t x;
    if (!ParseInteger(StripWhitespace(field), &x)) BadValue(key, *v, "a comma-separated integer list");
    out.push_back(x);
  }
  return out;
}

std::vector<double> KeyValueConfig::GetDoubleList(const std::string &key,
                                                  std::vector<double> fallback) const {
  const std::string *v = Lookup(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (auto field : Split(*v, ',')) {
    auto x = ParseDouble(StripWhitespace(field));
    if (!x) BadValue(key, *v, "a comma-separated number list");
    out.push_back(*x);
  }
  return out;
}

void KeyValueConfig::CheckAllUsed(const std::set<std::string> &sections) const {
  for (const auto &[key, value] : values_) {
    auto dot = key.find('.');
    std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    if (sections.count(section) && !used_.count(key))
      Fail(ErrorKind::kInvalidSpec, "unknown key '" + key + "'");
  }
}

std::string KeyValueConfig::ToString() const {
  std::string out;
  for (const auto &[key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

}  // namespace xlmmi
