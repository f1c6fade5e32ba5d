// include/xlmmi/phone-inventory.h

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

#ifndef XLMMI_PHONE_INVENTORY_H_
#define XLMMI_PHONE_INVENTORY_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xlmmi {

using PhoneId = int32_t;
using PhoneSeq = std::vector<PhoneId>;

// Phone symbol table. Ids start at 1; 0 is reserved for epsilon.
class PhoneInventory {
 public:
  PhoneInventory() = default;

  // Appends a symbol and returns its id. Throws kDuplicateSymbol or
  // kEmptySymbol (also for symbols containing whitespace).
  PhoneId Add(std::string_view symbol, std::set<std::string> languages = {});

  int32_t Size() const { return static_cast<int32_t>(symbols_.size()); }
  bool Contains(PhoneId id) const { return id >= 1 && id <= Size(); }
  // Returns 0 when the symbol is unknown.
  PhoneId Find(std::string_view symbol) const;
  const std::string &Symbol(PhoneId id) const { return symbols_.at(id - 1); }
  const std::set<std::string> &Languages(PhoneId id) const {
    return languages_.at(id - 1);
  }

  bool operator==(const PhoneInventory &) const = default;

 private:
  std::vector<std::string> symbols_;
  std::vector<std::set<std::string>> languages_;
  std::map<std::string, PhoneId, std::less<>> index_;
};

// One symbol per line, optionally followed by <TAB>lang1,lang2.
PhoneInventory LoadInventory(std::string_view text);
std::string WriteInventory(const PhoneInventory &inv);

struct Lexicon {
  // Word -> pronunciation variants, in file order.
  std::map<std::string, std::vector<PhoneSeq>, std::less<>> entries;

  const std::vector<PhoneSeq> *Find(std::string_view word) const {
    auto it = entries.find(word);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// Lines `word<TAB>phone phone ...`; repeated words accumulate variants.
Lexicon LoadLexicon(std::string_view text, const PhoneInventory &inv);
std::string WriteLexicon(const Lexicon &lex, const PhoneInventory &inv);

// For each word position, the set of its pronunciations.
using PhoneAlternatives = std::vector<std::vector<PhoneSeq>>;

PhoneAlternatives TranscriptToPhoneAlternatives(
    const std::vector<std::string> &words, const Lexicon &lex);

// Missing phone id -> replacement id, both in the id space of the sequences
// being remapped.
struct RemapTable {
  std::map<PhoneId, PhoneId> mapping;
};

// Lines `missing<TAB>replacement`, both symbols resolved in `inv`.
RemapTable LoadRemapTable(std::string_view text, const PhoneInventory &inv);
std::string WriteRemapTable(const RemapTable &table, const PhoneInventory &inv);

// Replacements must be training phones; no identity entries, no chains.
// Throws kInvalidRemap.
void ValidateRemapTable(const RemapTable &table,
                        const std::set<PhoneId> &training_phones);

// Phones in `training_phones` pass through; others must have a table entry.
// Throws kUnmappedMissingPhone naming the phone id.
PhoneSeq RemapSequence(const PhoneSeq &seq, const RemapTable &table,
                       const std::set<PhoneId> &training_phones);

// Parses space-separated phone symbols; throws kUnknownPhone.
PhoneSeq ParsePhones(std::string_view text, const PhoneInventory &inv);
std::string FormatPhones(const PhoneSeq &seq, const PhoneInventory &inv);

// Ids of the phones tagged with any of `languages`.
std::set<PhoneId> PhonesAttestedIn(const PhoneInventory &inv,
                                   const std::set<std::string> &languages);

}  // namespace xlmmi

#endif  // XLMMI_PHONE_INVENTORY_H_
