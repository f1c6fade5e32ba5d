#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "fixtures.h"
#include "xlmmi/lfmmi.h"
#include "xlmmi/phone-lm.h"
#include "xlmmi/text-utils.h"

namespace xlmmi {
namespace {

namespace fs = std::filesystem;

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / "xlmmi-cli-test";
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string Path(const std::string &name) const { return (dir / name).string(); }
  void Put(const std::string &name, const std::string &text) const {
    WriteFileAtomic(Path(name), text);
  }
};

struct Outcome {
  int code;
  std::string out, err;
};

// Runs the CLI from the workspace directory and captures both streams.
Outcome Cli(const Workspace &ws, const std::string &args) {
  const std::string command = "cd \"" + ws.dir.string() + "\" && \"" XLMMI_CLI "\" " + args +
                              " > stdout.txt 2> stderr.txt";
  const int status = std::system(command.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = ReadFile(ws.Path("stdout.txt"));
  o.err = ReadFile(ws.Path("stderr.txt"));
  return o;
}

TEST_CASE("usage errors exit 1 and help exits 0") {
  Workspace ws;
  CHECK(Cli(ws, "").code == 1);
  CHECK(Cli(ws, "no-such-command").code == 1);
  CHECK(Cli(ws, "estimate-lm --order 2").code == 1);
  CHECK(Cli(ws, "estimate-lm --order 2 --manifest m --vocab v --out o --bogus").code == 1);
  CHECK(Cli(ws, "--help").code == 0);
  CHECK(Cli(ws, "build-den --help").code == 0);
}

TEST_CASE("data errors exit 2 and name the file") {
  Workspace ws;
  Outcome o = Cli(ws, "build-den --lm missing.arpa --states-per-phone 1 --out den.wfsa");
  CHECK(o.code == 2);
  CHECK(o.err.find("missing.arpa") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.Path("den.wfsa")));

  ws.Put("phones.txt", "a\nb\n");
  ws.Put("corpus.txt", "a b\nb c\n");
  ws.Put("mix.tsv", "corpus.txt\t1\n");
  o = Cli(ws, "estimate-lm --order 2 --manifest mix.tsv --vocab phones.txt --out lm.arpa");
  CHECK(o.code == 2);
  CHECK(o.err.find("corpus.txt") != std::string::npos);
  CHECK(o.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.Path("lm.arpa")));
}

TEST_CASE("estimate-lm and build-den match the library") {
  Workspace ws;
  ws.Put("phones.txt", "a\nb\nc\n");
  ws.Put("one.txt", "a b\na\n");
  ws.Put("two.txt", "b b c\n");
  ws.Put("mix.tsv", "one.txt\t1\ntwo.txt\t0.5\n");
  REQUIRE(Cli(ws, "estimate-lm --order 2 --manifest mix.tsv --vocab phones.txt --out lm.arpa")
              .code == 0);
  PhoneInventory vocab = testing::Inventory(3);
  NGramModel lm = EstimateNGram({{{{1, 2}, {1}}, 1.0}, {{{2, 2, 3}}, 0.5}}, 2, vocab);
  CHECK(ReadFile(ws.Path("lm.arpa")) == WriteArpa(lm));

  REQUIRE(Cli(ws, "build-den --lm lm.arpa --vocab phones.txt --states-per-phone 2 --out den.wfsa")
              .code == 0);
  // The equivalent library call starts from the ARPA text.
  NGramModel read = ReadArpa(ReadFile(ws.Path("lm.arpa")), vocab);
  WeightedGraph den = BuildDenominator(LmToFsa(read), MakeTopology(2, true, 3));
  CHECK(ReadFile(ws.Path("den.wfsa")) == WriteGraph(den));
  // The vocabulary defaults to the LM's 1-grams.
  REQUIRE(Cli(ws, "build-den --lm lm.arpa --states-per-phone 2 --out den2.wfsa").code == 0);
  CHECK(ReadFile(ws.Path("den2.wfsa")) == WriteGraph(den));
}

TEST_CASE("loss prints the library values exactly") {
  Workspace ws;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 5; i++) {
    testing::Instance inst = testing::RandomInstance(rng, 12);
    // EMAT stores float32, so compare against the rounded matrix.
    Matrix e = inst.e.cast<float>().cast<double>();
    ws.Put("num.wfsa", WriteGraph(inst.num));
    ws.Put("den.wfsa", WriteGraph(inst.den));
    ws.Put("u.emat", WriteEmat(e));
    Outcome o = Cli(ws, "loss --num num.wfsa --den den.wfsa --emat u.emat");
    LossResult r = LfmmiLoss(inst.num, inst.den, e);
    if (o.code != 0) {
      // A numerator with no path of this length is a data error.
      CHECK(o.code == 2);
      continue;
    }
    CHECK(o.out == FormatDouble(r.loss) + " " + FormatDouble(r.num_logprob) + " " +
                       FormatDouble(r.den_logprob) + "\n");
  }
}

}  // namespace
}  // namespace xlmmi
