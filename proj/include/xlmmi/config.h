// include/xlmmi/config.h

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

#ifndef XLMMI_CONFIG_H_
#define XLMMI_CONFIG_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace xlmmi {

// Flat `key = value` file. A `[name]` header prefixes the keys that follow
// with `name.`; `#` starts a comment. Getters remember which keys were read
// so that CheckAllUsed() can reject unknown keys.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  // Throws kParse with the line number.
  static KeyValueConfig Parse(std::string_view text);

  bool Has(const std::string &key) const { return values_.count(key) != 0; }
  void Set(const std::string &key, const std::string &value) { values_[key] = value; }

  // Each throws kInvalidSpec when the value does not parse.
  std::string GetString(const std::string &key, const std::string &fallback) const;
  int64_t GetInt(const std::string &key, int64_t fallback) const;
  uint64_t GetUint(const std::string &key, uint64_t fallback) const;
  double GetDouble(const std::string &key, double fallback) const;
  bool GetBool(const std::string &key, bool fallback) const;
  std::vector<int64_t> GetIntList(const std::string &key, std::vector<int64_t> fallback) const;
  std::vector<double> GetDoubleList(const std::string &key, std::vector<double> fallback) const;

  // Throws kInvalidSpec naming the first key under one of `sections` that
  // no getter has asked for.
  void CheckAllUsed(const std::set<std::string> &sections) const;

  std::string ToString() const;

 private:
  const std::string *Lookup(const std::string &key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace xlmmi

#endif  // XLMMI_CONFIG_H_
