// Acceptance suite: one test per acceptance criterion, each printing a
// single [ACCEPT] PASS/FAIL line. Criterion 6b (XOR by boosted stumps) is
// expected to fail: sums of single-feature stumps are additive functions and
// provably cannot represent XOR, so the stated target is unattainable; the
// check is kept faithful rather than weakened. See the project notes.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>

#include <json.hpp>

#include <sention/sention.hpp>

#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace sention;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct AcceptLine {
  std::string id;
  explicit AcceptLine(std::string id) : id(std::move(id)) {}
  ~AcceptLine() {
    std::printf("[ACCEPT] %s: %s\n", id.c_str(),
                ::testing::Test::HasFailure() ? "FAIL" : "PASS");
    std::fflush(stdout);
  }
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int run_cmd(const std::string& cmd, std::string* out = nullptr) {
  static int counter = 0;
  const fs::path tmp = fs::temp_directory_path() /
                       ("sention-accept-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  const int status = std::system((cmd + " >" + tmp.string() + " 2>/dev/null").c_str());
  if (out) *out = slurp(tmp);
  fs::remove(tmp);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 300-sample synthetic benchmark shared by criteria 8 and 9
struct Benchmark {
  testutil::TempDir dir{"accept"};
  DatasetManifest manifest;
  fs::path manifest_path;

  Benchmark() {
    SyntheticConfig cfg;
    cfg.seed = 2024;
    cfg.image_size = 256;
    cfg.jitter_fraction = 0.1;
    manifest_path = write_synthetic_dataset(dir.path / "data", 50, cfg);  // 300 samples
    manifest = load_manifest(manifest_path);
  }
};

Benchmark& benchmark() {
  static Benchmark b;
  return b;
}

CvConfig benchmark_cv_config(FeatureMode mode) {
  CvConfig cfg;
  cfg.mode = mode;
  cfg.selection.estimators = 12;
  cfg.selection.threshold_candidates = 64;
  cfg.folds = 10;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

// --- criterion 1 --------------------------------------------------------------

TEST(Acceptance, C01_IvaCardinalityAndRuntime) {
  AcceptLine line("C1 iva cardinality 150348, <1s per image single-threaded");
  std::mt19937_64 rng(1);
  set_thread_count(1);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto lm = testutil::random_landmarks(rng);
    const Timer t;
    const auto f = iva_features(lm);
    worst = std::max(worst, t.seconds());
    ASSERT_EQ(f.size(), 150348u);
  }
  set_thread_count(0);
  EXPECT_LT(worst, 1.0) << "slowest extraction " << worst << "s";
}

// --- criterion 2 --------------------------------------------------------------

TEST(Acceptance, C02_SimilarityInvariance) {
  AcceptLine line("C2 similarity invariance (1e-6 full, 1e-9 scale+translation)");
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  std::uniform_real_distribution<double> rot(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> shift(-1e4, 1e4);
  double worst_full = 0.0, worst_rigid = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto lm = testutil::random_landmarks(rng);
    const auto base = iva_features(lm);
    const SimilarityTransform full{scale(rng), rot(rng), shift(rng), shift(rng)};
    const SimilarityTransform rigid{scale(rng), 0.0, shift(rng), shift(rng)};
    worst_full = std::max(worst_full, max_abs_diff(base, iva_features(transform_landmarks(lm, full))));
    worst_rigid =
        std::max(worst_rigid, max_abs_diff(base, iva_features(transform_landmarks(lm, rigid))));
  }
  EXPECT_LE(worst_full, 1e-6) << "max deviation under full similarity " << worst_full;
  EXPECT_LE(worst_rigid, 1e-9) << "max deviation under scale+translation " << worst_rigid;
}

// --- criterion 3 --------------------------------------------------------------

TEST(Acceptance, C03_AngleSumAndRange) {
  AcceptLine line("C3 per-triple angle sum pi (1e-9), all entries in [0, pi]");
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lm = testutil::random_landmarks(rng);
    const auto f = iva_features(lm);
    std::size_t slot = 0;
    for (std::size_t a = 0; a < kLandmarkCount; ++a)
      for (std::size_t b = a + 1; b < kLandmarkCount; ++b)
        for (std::size_t c = b + 1; c < kLandmarkCount; ++c, slot += 3) {
          ASSERT_GE(f[slot + 0], 0.0);
          ASSERT_LE(f[slot + 0], std::numbers::pi);
          ASSERT_GE(f[slot + 1], 0.0);
          ASSERT_LE(f[slot + 1], std::numbers::pi);
          ASSERT_GE(f[slot + 2], 0.0);
          ASSERT_LE(f[slot + 2], std::numbers::pi);
          if (!degenerate_triple(lm[a], lm[b], lm[c]))
            ASSERT_NEAR(f[slot] + f[slot + 1] + f[slot + 2], std::numbers::pi, 1e-9);
        }
  }
}

// --- criterion 4 --------------------------------------------------------------

TEST(Acceptance, C04_OracleEquivalence) {
  AcceptLine line("C4 optimized IVA == naive oracle, HOG == per-pixel reference (1e-9)");
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lm = testutil::random_landmarks(rng);
    ASSERT_LE(max_abs_diff(iva_features(lm), oracles::iva_naive(lm)), 1e-9) << "trial " << trial;
  }
  const HogConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage img = testutil::random_image(32, 32, rng);
    ASSERT_LE(max_abs_diff(hog_features(img, cfg), oracles::hog_reference(img, cfg)), 1e-9);
  }
}

// --- criterion 5 --------------------------------------------------------------

TEST(Acceptance, C05_HogStructuralChecks) {
  AcceptLine line("C5 hog: zero on constant, 79524 dims, clip 0.2, photometric invariance");
  const HogConfig cfg;
  for (double v : hog_features(GrayImage(64, 64, 0.37f), cfg)) ASSERT_EQ(v, 0.0);

  std::mt19937_64 rng(5);
  const GrayImage big = testutil::random_image(384, 384, rng);
  ASSERT_EQ(hog_features(big, cfg).size(), 79524u);

  // pre-renormalization clip bound, recovered by inverting the last stage
  GrayImage img = testutil::random_image(48, 48, rng);
  const auto f = hog_features(img, cfg);
  constexpr double eps = 1e-5;
  for (std::size_t b = 0; b < f.size() / 36; ++b) {
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < 36; ++i) norm_sq += f[b * 36 + i] * f[b * 36 + i];
    const double out_norm = std::sqrt(norm_sq);
    ASSERT_LE(out_norm, 1.0 + 1e-6);
    const double clipped_norm = eps * out_norm / std::max(1.0 - out_norm, 1e-12);
    for (std::size_t i = 0; i < 36; ++i)
      ASSERT_LE(f[b * 36 + i] * (clipped_norm + eps), cfg.clip * (1.0 + 1e-9));
  }

  // brightness: exact float shift on 8-bit-quantized pixels
  for (auto& v : img.pixels) v = static_cast<float>(static_cast<int>(v * 128.0f)) / 256.0f;
  GrayImage brighter = img;
  for (auto& v : brighter.pixels) v += 0.25f;
  ASSERT_LE(max_abs_diff(hog_features(img, cfg), hog_features(brighter, cfg)), 1e-6);

  GrayImage doubled = img;
  for (auto& v : doubled.pixels) v *= 2.0f;
  ASSERT_LE(max_abs_diff(hog_features(img, cfg), hog_features(doubled, cfg)), 1e-6);
}

// --- criterion 6 --------------------------------------------------------------

TEST(Acceptance, C06a_BoostingWeightsAndMaskBounds) {
  AcceptLine line("C6a boosting weights normalized; planted feature rank 1; masks <= 6T");
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);

  // weights positive and normalized each round on noisy data
  {
    const int n = 80;
    Matrix<float> x(n, 12);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < x.cols; ++j) x.at(i, j) = d(rng);
      y.push_back(x.at(i, 0) + 0.5f * x.at(i, 3) + 0.4f * d(rng) > 0 ? +1 : -1);
    }
    SelectionConfig cfg;
    cfg.estimators = 30;
    int rounds = 0;
    boost_samme_r(x, y, cfg, [&](int, const Stump&, std::span<const double> w) {
      ++rounds;
      double sum = 0.0;
      for (double v : w) {
        ASSERT_GT(v, 0.0);
        sum += v;
      }
      ASSERT_NEAR(sum, 1.0, 1e-9);
    });
    ASSERT_GT(rounds, 0);
  }

  // planted single informative feature tops the selection score, 100/100
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 40, dim = 60;
    const std::size_t planted = static_cast<std::size_t>(rng() % dim);
    Matrix<float> x(n, dim);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      const int label = i % 2 ? +1 : -1;
      y.push_back(label);
      for (int j = 0; j < dim; ++j) x.at(i, j) = d(rng);
      x.at(i, planted) = static_cast<float>(label);  // class = sign(feature j)
    }
    SelectionConfig cfg;
    cfg.estimators = 5;
    const BoostedEnsemble ens = boost_samme_r(x, y, cfg);
    std::size_t best = 0;
    for (std::size_t f = 1; f < ens.feature_score.size(); ++f)
      if (ens.feature_score[f] > ens.feature_score[best]) best = f;
    ASSERT_EQ(best, planted) << "trial " << trial;
  }

  // per-modality mask sizes bounded by 6T
  {
    const int n = 60;
    Matrix<float> x(n, 400);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      labels.push_back(i % 6);
      for (std::size_t j = 0; j < x.cols; ++j) x.at(i, j) = d(rng);
      x.at(i, labels.back()) = 4.0f + d(rng);
    }
    for (int t : {2, 10, 25}) {
      SelectionConfig cfg;
      cfg.estimators = t;
      const auto sel = select_features_oaa(x, labels, cfg, 250, 150);
      ASSERT_LE(sel.iva.size(), static_cast<std::size_t>(6 * t));
      ASSERT_LE(sel.hog.size(), static_cast<std::size_t>(6 * t));
      ASSERT_LE(sel.iva.size() + sel.hog.size(), static_cast<std::size_t>(6 * t));
    }
  }
}

TEST(Acceptance, C06b_XorByStumps) {
  AcceptLine line("C6b xor-by-stumps training error 0 within 10 rounds");
  // Any stump ensemble is g0(x0) + g1(x1); the XOR sign pattern forces
  // a + b + c + d > 0 and < 0 at once, so no round count can reach error 0.
  // The independent hand-simulated trace (test_boosting) computes error 0.5
  // at every round, and the implementation matches it exactly. The check is
  // asserted as stated rather than weakened.
  const std::vector<std::vector<double>> pts = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> y = {+1, +1, -1, -1};
  Matrix<float> x(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) x.at(i, j) = static_cast<float>(pts[i][j]);
  SelectionConfig cfg;
  cfg.estimators = 10;
  const BoostedEnsemble ens = boost_samme_r(x, y, cfg);
  int wrong = 0;
  for (int i = 0; i < 4; ++i) {
    const float row[2] = {x.at(i, 0), x.at(i, 1)};
    wrong += ens.predict(row) != y[i];
  }
  EXPECT_EQ(wrong, 0) << "stump ensembles are additive over coordinates and cannot express "
                         "XOR; training error stays at "
                      << wrong / 4.0;
}

// --- criterion 7 --------------------------------------------------------------

TEST(Acceptance, C07_SvmChecks) {
  AcceptLine line("C7 svm: KKT within tol, w==kernel form 1e-9, xor linear/rbf, 15 machines");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.5);

  // six-class fixture; every trained machine must satisfy KKT
  const double centers[6][4] = {{3, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 3, 0},
                                {0, 0, 0, 3}, {3, 3, 0, 0}, {0, 0, 3, 3}};
  Matrix<double> x(72, 4);
  std::vector<int> labels;
  for (int i = 0; i < 72; ++i) {
    const int cls = i % 6;
    labels.push_back(cls);
    for (int j = 0; j < 4; ++j) x.at(i, j) = centers[cls][j] + noise(rng);
  }
  SvmParams params;
  const auto [standardizer, machines] = train_oao(x, labels, params);
  ASSERT_EQ(machines.size(), 15u);
  std::array<int, 6> appearances{};
  Matrix<double> z = x;
  standardizer.transform_rows(z);
  for (const auto& m : machines) {
    appearances[m.class_a]++;
    appearances[m.class_b]++;
    ASSERT_TRUE(m.converged);
    // KKT via decisions: recover alphas by walking this machine's class rows
    std::vector<std::size_t> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < z.rows; ++i)
      if (labels[i] == m.class_a || labels[i] == m.class_b) {
        rows.push_back(i);
        y.push_back(labels[i] == m.class_a ? +1 : -1);
      }
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      double alpha = 0.0;
      if (cursor < m.support_vectors.rows) {
        bool same = true;
        for (std::size_t j = 0; j < z.cols; ++j)
          same &= z.at(rows[k], j) == m.support_vectors.at(cursor, j);
        if (same) alpha = std::abs(m.dual_coef[cursor++]);
      }
      const double yf = y[k] * m.decision_kernel_form(std::span(z.row(rows[k]), z.cols));
      if (alpha <= 1e-12)
        ASSERT_GE(yf, 1.0 - params.tolerance);
      else if (alpha >= params.c - 1e-12)
        ASSERT_LE(yf, 1.0 + params.tolerance);
      else
        ASSERT_NEAR(yf, 1.0, params.tolerance);
    }
    ASSERT_EQ(cursor, m.support_vectors.rows);
  }
  for (int c : appearances) ASSERT_EQ(c, 5);

  // linear w-form equals kernel form
  std::uniform_real_distribution<double> probe(-3.0, 3.0);
  for (const auto& m : machines) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<double> v = {probe(rng), probe(rng), probe(rng), probe(rng)};
      ASSERT_NEAR(m.decision(v), m.decision_kernel_form(v), 1e-9);
    }
  }

  // XOR: linear at most 75%, rbf(gamma=1, C=10) 100%
  Matrix<double> xr(4, 2);
  const double xor_pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> xor_y = {+1, +1, -1, -1};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) xr.at(i, j) = xor_pts[i][j];
  SvmParams lin;
  lin.c = 10.0;
  const BinarySvm linear_svm = train_binary_svm(xr, xor_y, lin);
  int linear_correct = 0;
  for (int i = 0; i < 4; ++i)
    linear_correct +=
        (linear_svm.decision(std::span(xr.row(i), 2)) > 0 ? +1 : -1) == xor_y[i];
  ASSERT_LE(linear_correct, 3);

  SvmParams rbf;
  rbf.kernel = Kernel::Rbf;
  rbf.gamma = 1.0;
  rbf.c = 10.0;
  const BinarySvm rbf_svm = train_binary_svm(xr, xor_y, rbf);
  for (int i = 0; i < 4; ++i)
    ASSERT_GT(rbf_svm.decision(std::span(xr.row(i), 2)) * xor_y[i], 0.0);
}

// --- criterion 8 --------------------------------------------------------------

TEST(Acceptance, C08_EndToEndSyntheticBenchmark) {
  AcceptLine line("C8 synthetic 300-sample 10-fold: hybrid >= 0.95, >= max(single) - 0.02, <= 5min");
  const Timer timer;
  auto& bench = benchmark();

  // generator sanity: a brute-force nearest-centroid oracle on the geometric
  // features must already reach 0.99 under the same folds
  {
    const auto ds = load_dataset(bench.manifest, false);
    const ModeDims dims = feature_dims(FeatureMode::Iva, HogConfig{}, AlignmentConfig{});
    const auto x = extract_feature_matrix(ds, FeatureMode::Iva, HogConfig{}, AlignmentConfig{}, dims);
    const auto fa = stratified_kfold(ds.labels, 10, 1);
    std::size_t correct = 0;
    for (int fold = 0; fold < 10; ++fold) {
      std::vector<std::vector<double>> centroid(6, std::vector<double>(x.cols, 0.0));
      std::array<int, 6> count{};
      for (std::size_t i = 0; i < x.rows; ++i) {
        if (fa.fold[i] == fold) continue;
        count[ds.labels[i]]++;
        for (std::size_t j = 0; j < x.cols; ++j) centroid[ds.labels[i]][j] += x.at(i, j);
      }
      for (int c = 0; c < 6; ++c)
        for (auto& v : centroid[c]) v /= std::max(count[c], 1);
      for (std::size_t i = 0; i < x.rows; ++i) {
        if (fa.fold[i] != fold) continue;
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < 6; ++c) {
          double d2 = 0.0;
          for (std::size_t j = 0; j < x.cols; ++j) {
            const double d = x.at(i, j) - centroid[c][j];
            d2 += d * d;
          }
          if (d2 < best_d) {
            best_d = d2;
            best = c;
          }
        }
        correct += best == ds.labels[i];
      }
    }
    const double oracle_acc = static_cast<double>(correct) / x.rows;
    ASSERT_GE(oracle_acc, 0.99) << "generator separability oracle";
  }

  const auto hybrid = run_cv(bench.manifest, benchmark_cv_config(FeatureMode::Hybrid));
  const auto iva = run_cv(bench.manifest, benchmark_cv_config(FeatureMode::Iva));
  const auto hog = run_cv(bench.manifest, benchmark_cv_config(FeatureMode::Hog));

  std::printf("[ACCEPT]   hybrid %.4f, iva %.4f, hog %.4f (%.0f s)\n", hybrid.report.accuracy,
              iva.report.accuracy, hog.report.accuracy, timer.seconds());
  EXPECT_GE(hybrid.report.accuracy, 0.95);
  EXPECT_GE(hybrid.report.accuracy,
            std::max(iva.report.accuracy, hog.report.accuracy) - 0.02);
  EXPECT_EQ(hybrid.confusion.total(), 300u);
  EXPECT_LE(timer.seconds(), 300.0);
}

// --- criterion 9 --------------------------------------------------------------

TEST(Acceptance, C09_ThroughputViaBench) {
  AcceptLine line("C9 cmd_bench single-threaded extract+predict >= 15 images/s");
  const char* cli = std::getenv("SENTION_CLI");
  ASSERT_NE(cli, nullptr) << "SENTION_CLI must point at the built binary";
  auto& bench = benchmark();

  // model trained on a 60-sample slice keeps this criterion fast
  const fs::path small = bench.dir.path / "bench-manifest.csv";
  {
    std::ofstream out(small);
    out << "image,landmarks,label\n";
    for (int i = 0; i < 60; ++i)
      out << bench.manifest.entries[i].image_path << ","
          << bench.manifest.entries[i].landmarks_path << ","
          << to_string(bench.manifest.entries[i].label) << "\n";
  }
  const fs::path model = bench.dir.path / "bench-model.sention";
  ASSERT_EQ(run_cmd(std::string(cli) + " train --manifest " + small.string() + " --model-out " +
                    model.string() + " --estimators 6 --threshold-candidates 32 --seed 5"),
            0);
  std::string out;
  ASSERT_EQ(run_cmd(std::string(cli) + " bench --manifest " + small.string() + " --model " +
                    model.string(), &out),
            0);
  const auto j = json::parse(out);
  const double fps = j.at("fps_single").get<double>();
  std::printf("[ACCEPT]   fps_single %.1f, fps_multi %.1f\n", fps,
              j.at("fps_multi").get<double>());
  EXPECT_GE(fps, 15.0);
}

// --- criterion 10 ---------------------------------------------------------------

TEST(Acceptance, C10_DatasetGatedReproduction) {
  const char* manifest_env = std::getenv("SENTION_CKPLUS_MANIFEST");
  if (!manifest_env) {
    std::printf("[ACCEPT] C10 dataset-gated reproduction: SKIP (set SENTION_CKPLUS_MANIFEST)\n");
    GTEST_SKIP() << "no dataset provided";
  }
  AcceptLine line("C10 dataset-gated 10-fold hybrid accuracy >= 0.90");
  CvConfig cfg;
  cfg.mode = FeatureMode::Hybrid;
  cfg.selection.estimators = 100;
  cfg.folds = 10;
  cfg.seed = 1;
  const auto res = run_cv(load_manifest(manifest_env), cfg);
  std::printf("[ACCEPT]   dataset accuracy %.4f\n", res.report.accuracy);
  EXPECT_GE(res.report.accuracy, 0.90);
}

// --- criterion 11 ---------------------------------------------------------------

TEST(Acceptance, C11_Determinism) {
  AcceptLine line("C11 fixed seed: byte-identical models and reports across runs");
  const char* cli = std::getenv("SENTION_CLI");
  ASSERT_NE(cli, nullptr);
  auto& bench = benchmark();

  const fs::path small = bench.dir.path / "det-manifest.csv";
  {
    std::ofstream out(small);
    out << "image,landmarks,label\n";
    for (int i = 0; i < 48; ++i)
      out << bench.manifest.entries[i].image_path << ","
          << bench.manifest.entries[i].landmarks_path << ","
          << to_string(bench.manifest.entries[i].label) << "\n";
  }

  const std::string train_args = std::string(cli) + " train --manifest " + small.string() +
                                 " --estimators 5 --threshold-candidates 32 --seed 17 --mode hybrid"
                                 " --model-out ";
  const fs::path m1 = bench.dir.path / "d1.sention", m2 = bench.dir.path / "d2.sention";
  ASSERT_EQ(run_cmd(train_args + m1.string()), 0);
  ASSERT_EQ(run_cmd(train_args + m2.string()), 0);
  EXPECT_EQ(slurp(m1), slurp(m2)) << "model bytes differ across identical train runs";

  const std::string eval_args = std::string(cli) + " eval --manifest " + small.string() +
                                " --mode iva --folds 4 --seed 17 --estimators 5"
                                " --threshold-candidates 32 --report-out ";
  const fs::path r1 = bench.dir.path / "r1", r2 = bench.dir.path / "r2";
  ASSERT_EQ(run_cmd(eval_args + r1.string()), 0);
  ASSERT_EQ(run_cmd(eval_args + r2.string()), 0);
  for (const char* ext : {".json", ".csv", ".svg"}) {
    EXPECT_EQ(slurp(r1.string() + ext), slurp(r2.string() + ext)) << ext;
  }
}
