// sention: batch CLI for the expression-recognition pipeline.
// Machine-readable results go to stdout as JSON lines; human-readable tables
// and warnings go to stderr.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <sention/sention.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonFlags {
  std::string mode = "hybrid";
  sention::SelectionConfig selection;
  sention::SvmParams svm;
  sention::HogConfig hog;
  sention::AlignmentConfig alignment;
  std::string kernel = "linear";
  std::vector<double> canonical_eyes;
};

void add_hog_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--hog-orientations", f.hog.orientations, "orientation bins over [0, pi)");
  cmd->add_option("--hog-cell", f.hog.cell_size, "cell size in pixels");
  cmd->add_option("--hog-clip", f.hog.clip, "L2-Hys truncation")->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--hog-upscale", f.hog.upscale_levels, "pyramid upscale levels")
      ->check(CLI::Range(0, 4));
  cmd->add_option("--canonical-eyes", f.canonical_eyes,
                  "canonical eye positions lx,ly,rx,ry in the aligned frame")
      ->delimiter(',')
      ->expected(4);
}

void add_train_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--mode", f.mode, "feature mode")
      ->check(CLI::IsMember({"iva", "hog", "hybrid", "vector_lengths"}));
  cmd->add_option("--estimators", f.selection.estimators, "AdaBoost rounds per sub-problem")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--top-k", f.selection.top_k, "features kept per sub-problem (0 = estimators)");
  cmd->add_option("--threshold-candidates", f.selection.threshold_candidates,
                  "stump threshold candidate cap")
      ->check(CLI::Range(1, 255));
  cmd->add_option("--seed", f.selection.seed, "deterministic seed");
  cmd->add_option("--kernel", f.kernel, "SVM kernel")->check(CLI::IsMember({"linear", "rbf"}));
  cmd->add_option("--svm-c", f.svm.c, "soft-margin penalty")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", f.svm.gamma, "rbf gamma (0 = 1/dim)");
  cmd->add_option("--svm-tol", f.svm.tolerance, "KKT tolerance")->check(CLI::PositiveNumber);
  add_hog_flags(cmd, f);
}

void finalize_flags(CommonFlags& f) {
  f.svm.kernel = f.kernel == "rbf" ? sention::Kernel::Rbf : sention::Kernel::Linear;
  if (f.canonical_eyes.size() == 4) {
    f.alignment.left_eye = {f.canonical_eyes[0], f.canonical_eyes[1]};
    f.alignment.right_eye = {f.canonical_eyes[2], f.canonical_eyes[3]};
  }
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SENTION_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // hardware default
}

ordered_json votes_json(const sention::PredictResult& p) {
  ordered_json votes;
  for (std::size_t c = 0; c < sention::kClassCount; ++c)
    votes[sention::expression_names()[c]] = p.votes[c];
  return votes;
}

void warn_config_drift(const sention::OaoModel& model, const CommonFlags& f,
                       const CLI::App* cmd) {
  const bool hog_given = cmd->count("--hog-orientations") || cmd->count("--hog-cell") ||
                         cmd->count("--hog-clip") || cmd->count("--hog-upscale");
  if (hog_given && (f.hog.orientations != model.hog.orientations ||
                    f.hog.cell_size != model.hog.cell_size || f.hog.clip != model.hog.clip ||
                    f.hog.upscale_levels != model.hog.upscale_levels))
    std::cerr << "warning: HOG flags differ from the model's embedded config; using the model's\n";
  if (cmd->count("--canonical-eyes"))
    std::cerr << "warning: --canonical-eyes ignored; alignment comes from the model\n";
}

// ---------------------------------------------------------------------------

int cmd_extract(const std::string& manifest_path, const CommonFlags& flags, const std::string& out_dir,
                bool skip_bad, bool csv_export, bool dump_aligned) {
  const sention::FeatureMode mode = sention::parse_feature_mode(flags.mode);
  const auto manifest = sention::load_manifest(manifest_path);
  fs::create_directories(out_dir);

  std::ofstream index(fs::path(out_dir) / "index.csv");
  index << "sample,iva,hog,label\n";

  const bool geometric = mode != sention::FeatureMode::Hog;
  const bool appearance = sention::mode_needs_image(mode);
  std::size_t written = 0, failed = 0;
  char name[32];
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    std::snprintf(name, sizeof name, "%06zu", i);
    try {
      const sention::LandmarkSet lm = sention::load_landmarks(e.landmarks_path);
      std::string iva_file, hog_file;
      if (geometric) {
        const std::vector<double> g = mode == sention::FeatureMode::VectorLengths
                                          ? sention::vector_length_features(lm)
                                          : sention::iva_features(lm);
        iva_file = (fs::path(out_dir) / (std::string(name) + ".iva.bin")).string();
        sention::write_feature_record(iva_file, sention::kIvaMagic, g);
        if (csv_export)
          sention::write_feature_csv(fs::path(out_dir) / (std::string(name) + ".iva.csv"), g);
      }
      if (appearance) {
        const sention::GrayImage img = sention::load_image(e.image_path);
        const sention::AlignedFace face = sention::align_face(img, lm, flags.alignment);
        if (dump_aligned)
          sention::save_pgm(face.image, fs::path(out_dir) / (std::string(name) + ".aligned.pgm"));
        const auto h = sention::hog_features(
            sention::pyramid_upscale(face.image, flags.hog.upscale_levels), flags.hog);
        hog_file = (fs::path(out_dir) / (std::string(name) + ".hog.bin")).string();
        sention::write_feature_record(hog_file, sention::kHogMagic, h);
        if (csv_export)
          sention::write_feature_csv(fs::path(out_dir) / (std::string(name) + ".hog.csv"), h);
      }
      index << e.image_path << "," << iva_file << "," << hog_file << ","
            << sention::to_string(e.label) << "\n";
      ++written;
    } catch (const sention::Error& err) {
      ++failed;
      std::cerr << "warning: sample " << i << " (" << e.image_path << "): " << err.what() << "\n";
      if (!skip_bad) {
        std::cerr << "error: aborting; pass --skip-bad to continue past bad samples\n";
        return 1;
      }
    }
  }
  ordered_json j{{"written", written}, {"failed", failed}, {"out_dir", out_dir}};
  std::cout << j.dump() << "\n";
  return failed > 0 && !skip_bad ? 1 : 0;
}

sention::OaoModel train_model(const sention::DatasetManifest& manifest, const CommonFlags& flags) {
  const sention::FeatureMode mode = sention::parse_feature_mode(flags.mode);
  const auto ds = sention::load_dataset(manifest, sention::mode_needs_image(mode));
  const auto dims = sention::feature_dims(mode, flags.hog, flags.alignment);
  const auto features = sention::extract_feature_matrix(ds, mode, flags.hog, flags.alignment, dims);

  sention::OaoModel model;
  model.mode = mode;
  model.hog = flags.hog;
  model.alignment = flags.alignment;
  model.svm = flags.svm;
  model.selection = flags.selection;
  model.masks =
      sention::select_features_oaa(features, ds.labels, flags.selection, dims.iva, dims.hog);
  const auto rows = sention::detail::identity_rows(features.rows);
  const auto reduced = sention::apply_mask_rows(features, rows, model.masks);
  auto [standardizer, machines] = sention::train_oao(reduced, ds.labels, flags.svm);
  model.standardizer = std::move(standardizer);
  model.machines = std::move(machines);
  return model;
}

int cmd_train(const std::string& manifest_path, const CommonFlags& flags, const std::string& model_out,
              const std::string& masks_out) {
  const auto manifest = sention::load_manifest(manifest_path);
  const sention::OaoModel model = train_model(manifest, flags);
  for (const auto& m : model.machines)
    if (!m.converged)
      std::cerr << "warning: machine " << sention::expression_names()[m.class_a] << "/"
                << sention::expression_names()[m.class_b]
                << " hit the iteration cap before meeting the KKT tolerance\n";
  sention::save_model(model, model_out);
  if (!masks_out.empty()) {
    std::ofstream out(masks_out);
    out << sention::masks_to_json(model.masks, flags.selection).dump(2) << "\n";
  }
  ordered_json j{{"model", model_out},
                 {"machines", model.machines.size()},
                 {"selected_iva", model.masks.iva.size()},
                 {"selected_hog", model.masks.hog.size()},
                 {"mode", sention::to_string(model.mode)}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& image_path,
                const std::string& landmarks_path, const CommonFlags& flags, const CLI::App* cmd) {
  const sention::OaoModel model = sention::load_model(model_path);
  warn_config_drift(model, flags, cmd);

  const auto t0 = std::chrono::steady_clock::now();
  const sention::LandmarkSet lm = sention::load_landmarks(landmarks_path);
  sention::GrayImage image;
  const sention::GrayImage* image_ptr = nullptr;
  if (sention::mode_needs_image(model.mode)) {
    image = sention::load_image(image_path);
    image_ptr = &image;
  }
  const std::vector<double> full =
      sention::extract_features(model.mode, image_ptr, lm, model.hog, model.alignment);
  const std::vector<double> reduced = sention::apply_mask(full, model.masks);
  const sention::PredictResult p = sention::predict(model, reduced);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  ordered_json j{{"label", sention::to_string(p.label)}, {"votes", votes_json(p)}, {"ms", ms}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_eval(const std::string& manifest_path, CommonFlags& flags, int folds,
             bool group_by_subject, const std::string& report_out, bool emit_timing) {
  sention::CvConfig cfg;
  cfg.mode = sention::parse_feature_mode(flags.mode);
  cfg.selection = flags.selection;
  cfg.svm = flags.svm;
  cfg.hog = flags.hog;
  cfg.alignment = flags.alignment;
  cfg.folds = folds;
  cfg.seed = flags.selection.seed;
  cfg.group_by_subject = group_by_subject;

  const auto manifest = sention::load_manifest(manifest_path);
  const sention::CvResult res = sention::run_cv(manifest, cfg);

  sention::emit_report_json(res.report, res.confusion, report_out + ".json", emit_timing);
  sention::emit_confusion_csv(res.confusion, report_out + ".csv");
  sention::emit_confusion_svg(res.confusion, report_out + ".svg");

  // human summary
  std::cerr << "mode=" << flags.mode << " folds=" << folds << " seed=" << cfg.seed << "\n";
  std::cerr << "accuracy " << res.report.accuracy << ", macro F1 " << res.report.macro_f1
            << ", throughput " << res.report.fps << " img/s\n";
  for (std::size_t c = 0; c < sention::kClassCount; ++c)
    std::cerr << "  " << sention::expression_names()[c] << ": P=" << res.report.precision[c]
              << " R=" << res.report.recall[c] << " F1=" << res.report.f1[c] << "\n";

  ordered_json j = sention::report_to_json(res.report, res.confusion, emit_timing);
  j["mode"] = flags.mode;
  j["feature_dim"] = sention::feature_dims(cfg.mode, cfg.hog, cfg.alignment).total();
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_bench(const std::string& manifest_path, const std::string& model_path) {
  const sention::OaoModel model = sention::load_model(model_path);
  const auto manifest = sention::load_manifest(manifest_path);
  const auto ds = sention::load_dataset(manifest, sention::mode_needs_image(model.mode));
  const std::size_t n = ds.landmarks.size();
  if (n == 0) throw sention::Error("empty manifest");

  const auto run_one = [&](std::size_t i) {
    const sention::GrayImage* img = ds.images.empty() ? nullptr : &ds.images[i];
    const auto full =
        sention::extract_features(model.mode, img, ds.landmarks[i], model.hog, model.alignment);
    const auto reduced = sention::apply_mask(full, model.masks);
    return sention::predict(model, reduced).label;
  };

  std::size_t sink = 0;
  const auto t1 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < n; ++i) sink += static_cast<std::size_t>(run_one(i));
  const double single_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

  const auto t2 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> sink2{0};
  sention::parallel_for(n, [&](std::size_t i) { sink2 += static_cast<std::size_t>(run_one(i)); });
  const double multi_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t2).count();

  const double fps_single = n / std::max(single_sec, 1e-9);
  const double fps_multi = n / std::max(multi_sec, 1e-9);
  if (fps_single > fps_multi)
    std::cerr << "warning: single-threaded ran faster than multi-threaded on this host\n";

  ordered_json j{{"n", n},
                 {"fps_single", fps_single},
                 {"fps_multi", fps_multi},
                 {"checksum", sink + sink2.load()}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_detect(const std::string& image_path, const std::string& command, double timeout,
               const std::string& out_path) {
  const sention::LandmarkSet lm = sention::detect_landmarks_external(image_path, command, timeout);
  if (!out_path.empty()) {
    sention::save_landmarks(lm, out_path);
    ordered_json j{{"landmarks", out_path}, {"count", sention::kLandmarkCount}};
    std::cout << j.dump() << "\n";
  } else {
    char buf[96];
    for (const auto& p : lm.points) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
      std::cout << buf;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sention — scale-invariant facial expression recognition pipeline"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker pool cap (env SENTION_THREADS, 0 = all cores)");

  CommonFlags flags;
  std::string manifest_path, out_dir, model_path, model_out, masks_out, image_path, landmarks_path;
  std::string report_out = "report", detector_command, detect_out;
  bool skip_bad = false, group_by_subject = false, emit_timing = false;
  bool csv_export = false, dump_aligned = false;
  int folds = 10;
  double detect_timeout = 10.0;

  auto* extract = app.add_subcommand("extract", "extract feature records for every manifest sample");
  extract->add_option("--manifest", manifest_path, "dataset manifest CSV")->required();
  extract->add_option("--out", out_dir, "output directory")->required();
  extract->add_option("--mode", flags.mode, "feature mode")
      ->check(CLI::IsMember({"iva", "hog", "hybrid", "vector_lengths"}));
  extract->add_flag("--skip-bad", skip_bad, "log and skip unreadable samples");
  extract->add_flag("--csv", csv_export, "also export features as one-value-per-line CSV");
  extract->add_flag("--dump-aligned", dump_aligned, "write each aligned face as a PGM");
  add_hog_flags(extract, flags);

  auto* train = app.add_subcommand("train", "train an expression model");
  train->add_option("--manifest", manifest_path, "dataset manifest CSV")->required();
  train->add_option("--model-out", model_out, "output model file")->required();
  train->add_option("--masks-out", masks_out, "optional JSON dump of the selected features");
  add_train_flags(train, flags);

  auto* predict = app.add_subcommand("predict", "classify one image + landmark file");
  predict->add_option("--model", model_path, "trained model file")->required();
  predict->add_option("--image", image_path, "input image")->required();
  predict->add_option("--landmarks", landmarks_path, "68-line landmark CSV")->required();
  add_hog_flags(predict, flags);

  auto* eval = app.add_subcommand("eval", "k-fold cross-validation with report emission");
  eval->add_option("--manifest", manifest_path, "dataset manifest CSV")->required();
  eval->add_option("--folds", folds, "fold count")->check(CLI::Range(2, 1000));
  eval->add_option("--report-out", report_out, "report path prefix (.json/.csv/.svg)");
  eval->add_flag("--group-by-subject", group_by_subject, "subject-disjoint folds");
  eval->add_flag("--emit-timing", emit_timing, "include wall-clock throughput in report files");
  add_train_flags(eval, flags);

  auto* bench = app.add_subcommand("bench", "measure extract+predict throughput");
  bench->add_option("--manifest", manifest_path, "dataset manifest CSV")->required();
  bench->add_option("--model", model_path, "trained model file")->required();

  auto* detect = app.add_subcommand("detect", "run an external landmark detector");
  detect->add_option("--image", image_path, "input image")->required();
  detect->add_option("--command", detector_command,
                     "detector command template with {input} and {output}")
      ->required();
  detect->add_option("--timeout", detect_timeout, "detector timeout in seconds");
  detect->add_option("--out", detect_out, "write landmarks here instead of stdout");

  CLI11_PARSE(app, argc, argv);
  sention::set_thread_count(resolve_threads(threads));
  finalize_flags(flags);

  try {
    if (extract->parsed())
      return cmd_extract(manifest_path, flags, out_dir, skip_bad, csv_export, dump_aligned);
    if (train->parsed()) return cmd_train(manifest_path, flags, model_out, masks_out);
    if (predict->parsed())
      return cmd_predict(model_path, image_path, landmarks_path, flags, predict);
    if (eval->parsed())
      return cmd_eval(manifest_path, flags, folds, group_by_subject, report_out, emit_timing);
    if (bench->parsed()) return cmd_bench(manifest_path, model_path);
    if (detect->parsed()) return cmd_detect(image_path, detector_command, detect_timeout, detect_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
