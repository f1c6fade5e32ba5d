// src/phone-inventory.cc

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

#include "xlmmi/phone-inventory.h"

#include "xlmmi/error.h"
#include "xlmmi/text-utils.h"

namespace xlmmi {

namespace {

std::string AtLine(int line_no) { return " at line " + std::to_string(line_no); }

}  // namespace

PhoneId PhoneInventory::Add(std::string_view symbol, std::set<std::string> languages) {
  if (symbol.empty() || SplitWhitespace(symbol).size() != 1 ||
      SplitWhitespace(symbol)[0].size() != symbol.size())
    Fail(ErrorKind::kEmptySymbol, "invalid phone symbol '" + std::string(symbol) + "'");
  if (index_.count(symbol))
    Fail(ErrorKind::kDuplicateSymbol, "duplicate phone symbol '" + std::string(symbol) + "'");
  symbols_.emplace_back(symbol);
  languages_.push_back(std::move(languages));
  PhoneId id = Size();
  index_.emplace(std::string(symbol), id);
  return id;
}

PhoneId PhoneInventory::Find(std::string_view symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? 0 : it->second;
}

PhoneInventory LoadInventory(std::string_view text) {
  PhoneInventory inv;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); i++) {
    int line_no = static_cast<int>(i) + 1;
    std::string_view line = lines[i];
    if (StripWhitespace(line).empty()) {
      // A blank final line is just the file terminator.
      if (i + 1 == lines.size()) break;
      Fail(ErrorKind::kEmptySymbol, "empty symbol" + AtLine(line_no));
    }
    auto fields = Split(line, '\t');
    if (fields.size() > 2)
      Fail(ErrorKind::kMalformedLine, "too many fields" + AtLine(line_no));
    std::set<std::string> langs;
    if (fields.size() == 2) {
      for (std::string_view lang : Split(fields[1], ','))
        if (!StripWhitespace(lang).empty()) langs.emplace(StripWhitespace(lang));
    }
    try {
      inv.Add(fields[0], std::move(langs));
    } catch (const Error &e) {
      Fail(e.kind(), std::string("'") + std::string(fields[0]) + "'" + AtLine(line_no));
    }
  }
  return inv;
}

std::string WriteInventory(const PhoneInventory &inv) {
  std::string out;
  for (PhoneId id = 1; id <= inv.Size(); id++) {
    out += inv.Symbol(id);
    const auto &langs = inv.Languages(id);
    if (!langs.empty()) {
      out += '\t';
      bool first = true;
      for (const auto &lang : langs) {
        if (!first) out += ',';
        out += lang;
        first = false;
      }
    }
    out += '\n';
  }
  return out;
}

PhoneSeq ParsePhones(std::string_view text, const PhoneInventory &inv) {
  PhoneSeq seq;
  for (std::string_view sym : SplitWhitespace(text)) {
    PhoneId id = inv.Find(sym);
    if (id == 0) Fail(ErrorKind::kUnknownPhone, "unknown phone '" + std::string(sym) + "'");
    seq.push_back(id);
  }
  return seq;
}

std::string FormatPhones(const PhoneSeq &seq, const PhoneInventory &inv) {
  std::string out;
  for (size_t i = 0; i < seq.size(); i++) {
    if (i) out += ' ';
    out += inv.Symbol(seq[i]);
  }
  return out;
}

Lexicon LoadLexicon(std::string_view text, const PhoneInventory &inv) {
  Lexicon lex;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); i++) {
    int line_no = static_cast<int>(i) + 1;
    if (StripWhitespace(lines[i]).empty()) continue;
    auto fields = Split(lines[i], '\t');
    if (fields.size() != 2 || StripWhitespace(fields[0]).empty() ||
        SplitWhitespace(fields[1]).empty())
      Fail(ErrorKind::kMalformedLine, "expected 'word<TAB>phones'" + AtLine(line_no));
    PhoneSeq pron;
    for (std::string_view sym : SplitWhitespace(fields[1])) {
      PhoneId id = inv.Find(sym);
      if (id == 0)
        Fail(ErrorKind::kUnknownPhone, "'" + std::string(sym) + "'" + AtLine(line_no));
      pron.push_back(id);
    }
    lex.entries[std::string(StripWhitespace(fields[0]))].push_back(std::move(pron));
  }
  return lex;
}

std::string WriteLexicon(const Lexicon &lex, const PhoneInventory &inv) {
  std::string out;
  for (const auto &[word, prons] : lex.entries)
    for (const PhoneSeq &pron : prons) out += word + "\t" + FormatPhones(pron, inv) + "\n";
  return out;
}

PhoneAlternatives TranscriptToPhoneAlternatives(const std::vector<std::string> &words,
                                                const Lexicon &lex) {
  PhoneAlternatives alternatives;
  alternatives.reserve(words.size());
  for (const std::string &word : words) {
    const auto *prons = lex.Find(word);
    if (prons == nullptr) Fail(ErrorKind::kOutOfVocabulary, "'" + word + "'");
    alternatives.push_back(*prons);
  }
  return alternatives;
}

RemapTable LoadRemapTable(std::string_view text, const PhoneInventory &inv) {
  RemapTable table;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); i++) {
    int line_no = static_cast<int>(i) + 1;
    if (StripWhitespace(lines[i]).empty()) continue;
    auto fields = SplitWhitespace(lines[i]);
    if (fields.size() != 2)
      Fail(ErrorKind::kMalformedLine, "expected 'missing<TAB>replacement'" + AtLine(line_no));
    PhoneId from = inv.Find(fields[0]), to = inv.Find(fields[1]);
    if (from == 0 || to == 0)
      Fail(ErrorKind::kUnknownPhone,
           "'" + std::string(from == 0 ? fields[0] : fields[1]) + "'" + AtLine(line_no));
    if (!table.mapping.emplace(from, to).second)
      Fail(ErrorKind::kInvalidRemap, "phone remapped twice" + AtLine(line_no));
  }
  return table;
}

std::string WriteRemapTable(const RemapTable &table, const PhoneInventory &inv) {
  std::string out;
  for (auto [from, to] : table.mapping) out += inv.Symbol(from) + "\t" + inv.Symbol(to) + "\n";
  return out;
}

void ValidateRemapTable(const RemapTable &table, const std::set<PhoneId> &training_phones) {
  for (auto [from, to] : table.mapping) {
    if (from == to)
      Fail(ErrorKind::kInvalidRemap, "identity entry for phone " + std::to_string(from));
    if (!training_phones.count(to))
      Fail(ErrorKind::kInvalidRemap,
           "replacement " + std::to_string(to) + " is not a training phone");
    if (table.mapping.count(to))
      Fail(ErrorKind::kInvalidRemap, "chained entry through phone " + std::to_string(to));
  }
}

PhoneSeq RemapSequence(const PhoneSeq &seq, const RemapTable &table,
                       const std::set<PhoneId> &training_phones) {
  PhoneSeq out;
  out.reserve(seq.size());
  for (PhoneId p : seq) {
    if (training_phones.count(p)) {
      out.push_back(p);
      continue;
    }
    auto it = table.mapping.find(p);
    if (it == table.mapping.end())
      Fail(ErrorKind::kUnmappedMissingPhone, "phone " + std::to_string(p));
    out.push_back(it->second);
  }
  return out;
}

std::set<PhoneId> PhonesAttestedIn(const PhoneInventory &inv,
                                   const std::set<std::string> &languages) {
  std::set<PhoneId> result;
  for (PhoneId id = 1; id <= inv.Size(); id++)
    for (const auto &lang : inv.Languages(id))
      if (languages.count(lang)) {
        result.insert(id);
        break;
      }
  return result;
}

}  // namespace xlmmi
