// tests/phone-inventory-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <random>

#include "xlmmi/error.h"
#include "xlmmi/phone-inventory.h"

using namespace xlmmi;

namespace {

std::string ErrorText(const std::function<void()> &f, ErrorKind *kind) {
  try {
    f();
  } catch (const Error &e) {
    *kind = e.kind();
    return e.what();
  }
  FAIL("no error thrown");
  return "";
}

PhoneInventory Letters(const std::string &letters) {
  PhoneInventory inv;
  for (char c : letters) inv.Add(std::string(1, c));
  return inv;
}

}  // namespace

TEST_CASE("inventory ids follow file order") {
  PhoneInventory inv = LoadInventory("a\nb\nc\n");
  CHECK(inv.Size() == 3);
  CHECK(inv.Find("a") == 1);
  CHECK(inv.Find("c") == 3);
  CHECK(inv.Find("z") == 0);
  CHECK(!inv.Contains(0));
}

TEST_CASE("inventory errors carry the line number") {
  ErrorKind kind;
  std::string msg = ErrorText([] { LoadInventory("a\na"); }, &kind);
  CHECK(kind == ErrorKind::kDuplicateSymbol);
  CHECK(msg.find("line 2") != std::string::npos);
  msg = ErrorText([] { LoadInventory("a\n\tL1\n"); }, &kind);
  CHECK(kind == ErrorKind::kEmptySymbol);
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("language tags") {
  PhoneInventory inv = LoadInventory("a\tL1,L2\nb\tL1\nc\n");
  CHECK(inv.Languages(1) == std::set<std::string>{"L1", "L2"});
  CHECK(inv.Languages(3).empty());
  CHECK(PhonesAttestedIn(inv, {"L2"}) == std::set<PhoneId>{1});
  CHECK(PhonesAttestedIn(inv, {"L1"}) == std::set<PhoneId>{1, 2});
  CHECK(LoadInventory(WriteInventory(inv)) == inv);
}

TEST_CASE("lexicon loading") {
  PhoneInventory inv = LoadInventory("k\na\nt\nx\ny\nd\no\n");
  Lexicon lex = LoadLexicon("cat\tk a t\na\tx\na\ty\n", inv);
  CHECK(lex.Find("cat")->size() == 1);
  CHECK((*lex.Find("cat"))[0] == PhoneSeq{1, 2, 3});
  CHECK(*lex.Find("a") == std::vector<PhoneSeq>{{4}, {5}});
  CHECK(lex.Find("dog") == nullptr);
  CHECK(LoadLexicon(WriteLexicon(lex, inv), inv).entries == lex.entries);

  ErrorKind kind;
  std::string msg = ErrorText([&] { LoadLexicon("cat\tk a t\ndog\td o g\n", inv); }, &kind);
  CHECK(kind == ErrorKind::kUnknownPhone);
  CHECK(msg.find("'g'") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
  ErrorText([&] { LoadLexicon("cat k a t\n", inv); }, &kind);
  CHECK(kind == ErrorKind::kMalformedLine);
}

TEST_CASE("transcript expansion") {
  PhoneInventory inv = LoadInventory("k\na\nt\nx\ny\n");
  Lexicon lex = LoadLexicon("cat\tk a t\na\tx\na\ty\n", inv);
  auto alts = TranscriptToPhoneAlternatives({"cat"}, lex);
  CHECK(alts == PhoneAlternatives{{{1, 2, 3}}});
  alts = TranscriptToPhoneAlternatives({"a", "a"}, lex);
  REQUIRE(alts.size() == 2);
  CHECK(alts[0].size() * alts[1].size() == 4);
  ErrorKind kind;
  ErrorText([&] { TranscriptToPhoneAlternatives({"zzz"}, lex); }, &kind);
  CHECK(kind == ErrorKind::kOutOfVocabulary);
}

TEST_CASE("expansion count is the product of variant counts") {
  // Random lexicons with up to 3 variants per word; enumerate every
  // full-sequence expansion and count the distinct ones.
  PhoneInventory inv = Letters("abcdefgh");
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; trial++) {
    Lexicon lex;
    std::vector<std::string> words;
    int nwords = 1 + trial % 4;
    for (int w = 0; w < nwords; w++) {
      std::string word = "w" + std::to_string(w);
      int nvar = 1 + static_cast<int>(rng() % 3);
      std::set<PhoneSeq> distinct;
      while (static_cast<int>(distinct.size()) < nvar) {
        PhoneSeq p;
        for (int i = 0, len = 1 + static_cast<int>(rng() % 3); i < len; i++)
          p.push_back(1 + static_cast<int>(rng() % 8));
        distinct.insert(p);
      }
      lex.entries[word] = {distinct.begin(), distinct.end()};
      words.push_back(word);
    }
    auto alts = TranscriptToPhoneAlternatives(words, lex);
    size_t product = 1;
    for (auto &a : alts) product *= a.size();
    std::set<std::vector<PhoneSeq>> expansions;
    std::vector<PhoneSeq> cur;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == alts.size()) {
        expansions.insert(cur);
        return;
      }
      for (auto &p : alts[i]) {
        cur.push_back(p);
        rec(i + 1);
        cur.pop_back();
      }
    };
    rec(0);
    CHECK(expansions.size() == product);
  }
}

TEST_CASE("remapping") {
  PhoneInventory inv = Letters("abkq");
  const PhoneId a = 1, b = 2, k = 3, q = 4;
  std::set<PhoneId> training = {a, b, k};
  RemapTable empty;
  CHECK(RemapSequence({a, b}, empty, training) == PhoneSeq{a, b});
  RemapTable table = LoadRemapTable("q\tk\n", inv);
  CHECK(table.mapping.at(q) == k);
  CHECK(RemapSequence({a, q}, table, training) == PhoneSeq{a, k});
  ErrorKind kind;
  std::string msg = ErrorText([&] { RemapSequence({a, q}, empty, training); }, &kind);
  CHECK(kind == ErrorKind::kUnmappedMissingPhone);
  CHECK(msg.find("4") != std::string::npos);
  CHECK(LoadRemapTable(WriteRemapTable(table, inv), inv).mapping == table.mapping);
}

TEST_CASE("remapping is idempotent") {
  std::mt19937_64 rng(2);
  std::set<PhoneId> training = {1, 2, 3, 4};
  RemapTable table;
  table.mapping = {{5, 2}, {6, 4}, {7, 1}};
  ValidateRemapTable(table, training);
  for (int i = 0; i < 100; i++) {
    PhoneSeq seq;
    for (int j = 0; j < 8; j++) seq.push_back(1 + static_cast<int>(rng() % 7));
    PhoneSeq once = RemapSequence(seq, table, training);
    CHECK(RemapSequence(once, table, training) == once);
    for (PhoneId p : once) CHECK(training.count(p) == 1);
  }
}

TEST_CASE("remap table validation") {
  std::set<PhoneId> training = {1, 2};
  ErrorKind kind;
  RemapTable t;
  t.mapping = {{3, 3}};
  ErrorText([&] { ValidateRemapTable(t, training); }, &kind);
  CHECK(kind == ErrorKind::kInvalidRemap);
  t.mapping = {{3, 4}};
  ErrorText([&] { ValidateRemapTable(t, training); }, &kind);
  CHECK(kind == ErrorKind::kInvalidRemap);
  t.mapping = {{3, 1}, {1, 2}};
  ErrorText([&] { ValidateRemapTable(t, training); }, &kind);
  CHECK(kind == ErrorKind::kInvalidRemap);
}

TEST_CASE("phone strings") {
  PhoneInventory inv = Letters("abc");
  CHECK(ParsePhones("  c a  b ", inv) == PhoneSeq{3, 1, 2});
  CHECK(FormatPhones({3, 1, 2}, inv) == "c a b");
  CHECK(ParsePhones("", inv).empty());
  ErrorKind kind;
  ErrorText([&] { ParsePhones("a z", inv); }, &kind);
  CHECK(kind == ErrorKind::kUnknownPhone);
}
