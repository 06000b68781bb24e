#include <doctest.h>

#include <fstream>
#include <sstream>

#include "tempdir.hpp"
#include "smcreg/benchmark.hpp"
#include "smcreg/cli.hpp"
#include "smcreg/pipeline.hpp"
#include "smcreg/volume_io.hpp"

using namespace smcreg;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "smcreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> small_phantom(const std::string& dir, const std::string& truth) {
  return {"phantom", "--dims", "24,24,24", "--spacing", "2.5,2.5,2.5", "--truth=" + truth, "--frames", "2", "--out-dir", dir};
}

}  // namespace

TEST_CASE("help and usage errors") {
  const Run help = cli({"register", "--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--target") != std::string::npos);
  CHECK(cli({"register", "--bogus"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  const Run bad_mode = cli({"register", "--target", "a.nii", "--source", "b.nii", "--out", "r.json", "--mode", "x"});
  CHECK(bad_mode.code == 1);
  CHECK(bad_mode.err.find("mode") != std::string::npos);
  CHECK(cli({"phantom", "--out-dir", "/tmp/x", "--truth", "1,2,3"}).code == 1);
}

TEST_CASE("data errors exit 2 and name the file") {
  TempDir tmp;
  const std::string missing = (tmp.path / "missing.nii").string();
  const Run r = cli({"register", "--target", missing, "--source", missing, "--out", (tmp.path / "r.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing.nii") != std::string::npos);
  CHECK(cli({"summarize", "--reports", (tmp.path / "*.json").string(), "--out", (tmp.path / "t.csv").string()}).code == 2);
}

TEST_CASE("phantom, register, exhaustive and summarize end to end") {
  TempDir tmp;
  const std::string dir = (tmp.path / "case").string();
  REQUIRE(cli(small_phantom(dir, "2,-1,1,0,0,5")).code == 0);
  for (const char* f : {"target.nii", "source.nii", "target_masks.nii", "source_masks.nii", "case.json"})
    CHECK(std::filesystem::exists(tmp.path / "case" / f));
  CHECK(read_sequence(tmp.path / "case" / "source.nii").size() == 2);

  const std::vector<std::string> pair{"--target", dir + "/target.nii", "--source", dir + "/source.nii",
                                      "--target-masks", dir + "/target_masks.nii", "--source-masks",
                                      dir + "/source_masks.nii"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), pair.begin(), pair.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  const std::string out1 = (tmp.path / "r1.json").string();
  const Run reg = cli(with({"register"}, {"--mode", "mask", "--particles", "64", "--iterations", "15", "--t-limit",
                                          "5", "--r-limit", "5", "--workers", "2", "--out", out1, "--out-volume",
                                          (tmp.path / "reg.nii").string(), "--out-csv", (tmp.path / "r1.csv").string()}));
  REQUIRE(reg.code == 0);
  const RegistrationReport r1 = read_report(out1);
  REQUIRE(r1.frames.size() == 2);
  CHECK(*r1.frames[0].dsc_after >= *r1.frames[0].dsc_before);
  CHECK(r1.config["particles"] == 64);
  CHECK(read_sequence(tmp.path / "reg.nii").size() == 2);
  CHECK(std::filesystem::exists(tmp.path / "r1.csv"));

  const std::string out2 = (tmp.path / "r2.json").string();
  const Run ex = cli(with({"exhaustive"}, {"--mode", "mask", "--steps", "2,1,1,0,0,1", "--step-t", "1", "--step-r",
                                           "5", "--out", out2}));
  REQUIRE(ex.code == 0);
  const RegistrationReport r2 = read_report(out2);
  CHECK(r2.method == "exhaustive");
  CHECK(r2.config["nodes"] == 5 * 3 * 3 * 3);
  CHECK(r2.transform.tx == 2.0);
  CHECK(r2.transform.rz == doctest::Approx(5.0));

  const std::string table = (tmp.path / "table.csv").string();
  const Run sum = cli({"summarize", "--reports", (tmp.path / "r*.json").string(), "--out", table});
  REQUIRE(sum.code == 0);
  CHECK(sum.out.find("q2") != std::string::npos);
}

TEST_CASE("exhaustive rejects malformed step lists") {
  CHECK(cli({"exhaustive", "--target", "a.nii", "--source", "b.nii", "--out", "r.json", "--steps", "1,1,1"}).code == 1);
  CHECK(cli({"exhaustive", "--target", "a.nii", "--source", "b.nii", "--out", "r.json", "--steps", "1,1,1,1,1,0.5"})
            .code == 1);
}

TEST_CASE("bench writes per-repeat and median rows") {
  TempDir tmp;
  const std::string dir = (tmp.path / "case").string();
  REQUIRE(cli(small_phantom(dir, "1,0,0,0,0,0")).code == 0);
  const std::string csv = (tmp.path / "bench.csv").string();
  const Run b = cli({"bench", "--case", dir, "--workers", "1,2", "--repeats", "2", "--out", csv, "--particles", "16",
                     "--iterations", "3", "--mode", "mask"});
  REQUIRE(b.code == 0);
  std::ifstream f(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(f, line)) lines.push_back(line);
  REQUIRE(lines.size() == 1 + 2 * 3);
  CHECK(lines[0] == "case,workers,repeat,wall_s,speedup,checksum");
  CHECK(lines[3].find(",median,") != std::string::npos);
}
