// End-to-end subcommand tests against the built binaries. The test runner
// passes the binary locations via SENTION_CLI / SENTION_DATAGEN.

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <sention/features_io.hpp>
#include <sention/manifest.hpp>
#include <sention/synthetic.hpp>

#include "support/testutil.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

RunResult run(const std::string& cmd) {
  static int counter = 0;
  const fs::path out = fs::temp_directory_path() / ("sention-cli-out-" + std::to_string(::getpid()) +
                                                    "-" + std::to_string(counter));
  const fs::path err = fs::temp_directory_path() / ("sention-cli-err-" + std::to_string(::getpid()) +
                                                    "-" + std::to_string(counter));
  ++counter;
  const std::string full = cmd + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(full.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  fs::remove(out);
  fs::remove(err);
  return r;
}

std::string cli() {
  const char* p = std::getenv("SENTION_CLI");
  EXPECT_NE(p, nullptr) << "SENTION_CLI must point at the built binary";
  return p ? p : "";
}

std::string datagen() {
  const char* p = std::getenv("SENTION_DATAGEN");
  EXPECT_NE(p, nullptr) << "SENTION_DATAGEN must point at the built binary";
  return p ? p : "";
}

// one shared dataset + model for the whole suite
struct CliFixture {
  testutil::TempDir dir{"cli"};
  fs::path manifest;
  fs::path model;

  CliFixture() {
    const auto gen = run(datagen() + " --out " + (dir.path / "data").string() +
                         " --per-class 7 --seed 11 --image-size 192");
    EXPECT_EQ(gen.exit_code, 0) << gen.err;
    manifest = dir.path / "data" / "manifest.csv";
    model = dir.path / "model.sention";
    const auto train = run(cli() + " train --manifest " + manifest.string() + " --model-out " +
                           model.string() +
                           " --estimators 4 --threshold-candidates 32 --seed 3 --mode hybrid");
    EXPECT_EQ(train.exit_code, 0) << train.err;
  }
};

CliFixture& fixture() {
  static CliFixture f;
  return f;
}

}  // namespace

TEST(Cli, HelpExitsZeroForEverySubcommand) {
  for (const std::string sub :
       {"", " extract", " train", " predict", " eval", " bench", " detect"}) {
    const auto r = run(cli() + sub + " --help");
    EXPECT_EQ(r.exit_code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
}

TEST(Cli, TrainEmitsModelAndSummary) {
  auto& f = fixture();
  ASSERT_TRUE(fs::exists(f.model));
  const auto j = json::parse(run(cli() + " train --manifest " + f.manifest.string() +
                                 " --model-out " + (f.dir.path / "m2.sention").string() +
                                 " --estimators 4 --threshold-candidates 32 --seed 3")
                                 .out);
  EXPECT_EQ(j.at("machines"), 15);
  EXPECT_GE(j.at("selected_iva").get<int>(), 1);
}

TEST(Cli, TrainIsByteDeterministic) {
  auto& f = fixture();
  const std::string args = " train --manifest " + f.manifest.string() +
                           " --estimators 4 --threshold-candidates 32 --seed 9 --mode iva";
  const fs::path m1 = f.dir.path / "det1.sention", m2 = f.dir.path / "det2.sention";
  ASSERT_EQ(run(cli() + args + " --model-out " + m1.string()).exit_code, 0);
  ASSERT_EQ(run(cli() + args + " --model-out " + m2.string()).exit_code, 0);
  EXPECT_EQ(slurp(m1), slurp(m2));
}

TEST(Cli, ExtractWritesRecordsAndIndex) {
  auto& f = fixture();
  // tiny manifest: first 3 samples only
  const auto full = sention::load_manifest(f.manifest);
  const fs::path small = f.dir.path / "small.csv";
  std::ofstream out(small);
  out << "image,landmarks,label\n";
  for (int i = 0; i < 3; ++i)
    out << full.entries[i].image_path << "," << full.entries[i].landmarks_path << ","
        << sention::to_string(full.entries[i].label) << "\n";
  out.close();

  const fs::path feat = f.dir.path / "features";
  const auto r = run(cli() + " extract --manifest " + small.string() + " --mode iva --out " +
                     feat.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("written"), 3);
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%06d.iva.bin", i);
    const auto values = sention::read_feature_record(feat / name, sention::kIvaMagic);
    ASSERT_EQ(values.size(), sention::kIvaDimension);
  }
  EXPECT_TRUE(fs::exists(feat / "index.csv"));
}

TEST(Cli, ExtractCsvAndAlignedDumps) {
  auto& f = fixture();
  const auto full = sention::load_manifest(f.manifest);
  const fs::path one = f.dir.path / "one.csv";
  std::ofstream out(one);
  out << "image,landmarks,label\n"
      << full.entries[0].image_path << "," << full.entries[0].landmarks_path << ","
      << sention::to_string(full.entries[0].label) << "\n";
  out.close();

  const fs::path feat = f.dir.path / "debug";
  const auto r = run(cli() + " extract --manifest " + one.string() +
                     " --mode hybrid --csv --dump-aligned --out " + feat.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(fs::exists(feat / "000000.iva.csv"));
  EXPECT_TRUE(fs::exists(feat / "000000.hog.csv"));
  const auto face = sention::load_image(feat / "000000.aligned.pgm");
  EXPECT_EQ(face.width, 192);
  EXPECT_EQ(face.height, 192);
  // CSV export agrees with the binary record
  const auto bin = sention::read_feature_record(feat / "000000.iva.bin", sention::kIvaMagic);
  std::ifstream csv(feat / "000000.iva.csv");
  std::string line;
  std::size_t rows = 0;
  double first = -1;
  while (std::getline(csv, line)) {
    if (rows == 0) first = std::stod(line);
    ++rows;
  }
  EXPECT_EQ(rows, bin.size());
  EXPECT_EQ(first, bin[0]);
}

TEST(Cli, ExtractSkipBadKeepsGoing) {
  auto& f = fixture();
  const auto full = sention::load_manifest(f.manifest);
  const fs::path broken = f.dir.path / "broken.csv";
  std::ofstream out(broken);
  out << "image,landmarks,label\n";
  out << full.entries[0].image_path << "," << full.entries[0].landmarks_path << ",Anger\n";
  out << "missing.pgm,missing.csv,Happy\n";
  out << full.entries[2].image_path << "," << full.entries[2].landmarks_path << ",Fear\n";
  out.close();

  const fs::path feat = f.dir.path / "skipbad";
  const auto r = run(cli() + " extract --manifest " + broken.string() + " --mode iva --out " +
                     feat.string() + " --skip-bad");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("written"), 2);
  EXPECT_EQ(j.at("failed"), 1);
  EXPECT_NE(r.err.find("warning"), std::string::npos);

  const auto r2 = run(cli() + " extract --manifest " + broken.string() + " --mode iva --out " +
                      (f.dir.path / "nofault").string());
  EXPECT_NE(r2.exit_code, 0);
}

TEST(Cli, TrainRejectsManifestMissingAClass) {
  auto& f = fixture();
  const auto full = sention::load_manifest(f.manifest);
  const fs::path partial = f.dir.path / "nofear.csv";
  std::ofstream out(partial);
  out << "image,landmarks,label\n";
  for (const auto& e : full.entries)
    if (e.label != sention::Expression::Fear)
      out << e.image_path << "," << e.landmarks_path << "," << sention::to_string(e.label) << "\n";
  out.close();
  const auto r = run(cli() + " train --manifest " + partial.string() + " --model-out " +
                     (f.dir.path / "nofear.sention").string() + " --estimators 2 --mode iva");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("Fear"), std::string::npos);
}

TEST(Cli, PredictEmitsJsonLineWithFifteenVotes) {
  auto& f = fixture();
  const auto full = sention::load_manifest(f.manifest);
  const auto r = run(cli() + " predict --model " + f.model.string() + " --image " +
                     full.entries[0].image_path + " --landmarks " + full.entries[0].landmarks_path);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = json::parse(r.out);
  int total = 0;
  for (const auto& [name, votes] : j.at("votes").items()) total += votes.get<int>();
  EXPECT_EQ(total, 15);
  EXPECT_GT(j.at("ms").get<double>(), 0.0);
  // the training sample classifies as its own label with all 5 of its
  // pairwise machines agreeing on this easy set
  const std::string label = sention::to_string(full.entries[0].label);
  EXPECT_EQ(j.at("label"), label);
  EXPECT_EQ(j.at("votes").at(label), 5);
}

TEST(Cli, PredictWarnsWhenFlagsDisagreeWithModel) {
  auto& f = fixture();
  const auto full = sention::load_manifest(f.manifest);
  const auto r = run(cli() + " predict --model " + f.model.string() + " --image " +
                     full.entries[1].image_path + " --landmarks " + full.entries[1].landmarks_path +
                     " --hog-cell 4");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, EvalWritesAllThreeReportsDeterministically) {
  auto& f = fixture();
  const std::string args = " eval --manifest " + f.manifest.string() +
                           " --mode iva --folds 3 --seed 7 --estimators 4"
                           " --threshold-candidates 32 --report-out ";
  const fs::path r1 = f.dir.path / "rep1", r2 = f.dir.path / "rep2";
  const auto a = run(cli() + args + r1.string());
  ASSERT_EQ(a.exit_code, 0) << a.err;
  const auto b = run(cli() + args + r2.string());
  ASSERT_EQ(b.exit_code, 0);
  for (const char* ext : {".json", ".csv", ".svg"}) {
    ASSERT_TRUE(fs::exists(r1.string() + ext)) << ext;
    EXPECT_EQ(slurp(r1.string() + ext), slurp(r2.string() + ext)) << ext;
  }
  const auto j = json::parse(slurp(r1.string() + ".json"));
  EXPECT_EQ(j.at("schema"), "sention-report/1");
  EXPECT_EQ(j.at("samples"), 42);
  // stdout carries the same report as a JSON line, plus mode and dimension
  const auto line = json::parse(a.out);
  EXPECT_EQ(line.at("samples"), 42);
  EXPECT_EQ(line.at("feature_dim"), 150348);
  EXPECT_NE(a.err.find("accuracy"), std::string::npos);
}

TEST(Cli, EvalRejectsSingleFold) {
  auto& f = fixture();
  const auto r = run(cli() + " eval --manifest " + f.manifest.string() + " --folds 1");
  EXPECT_NE(r.exit_code, 0);
}

TEST(Cli, BenchReportsPositiveThroughput) {
  auto& f = fixture();
  const auto r = run(cli() + " bench --manifest " + f.manifest.string() + " --model " +
                     f.model.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_GT(j.at("fps_single").get<double>(), 0.0);
  EXPECT_GT(j.at("fps_multi").get<double>(), 0.0);
}

TEST(Cli, DetectRunsStubDetector) {
  auto& f = fixture();
  const auto full = sention::load_manifest(f.manifest);
  const std::string lm_fixture = full.entries[0].landmarks_path;
  const fs::path out_lm = f.dir.path / "detected.csv";
  const auto r = run(cli() + " detect --image " + full.entries[0].image_path + " --command 'cp " +
                     lm_fixture + " {output} && test -f {input}' --out " + out_lm.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto lm = sention::load_landmarks(out_lm);
  const auto want = sention::load_landmarks(lm_fixture);
  EXPECT_EQ(lm[10].x, want[10].x);

  const auto fail = run(cli() + " detect --image x.pgm --command 'echo no >&2; exit 3; {input}{output}'");
  EXPECT_NE(fail.exit_code, 0);
  EXPECT_NE(fail.err.find("exit 3"), std::string::npos);
}
