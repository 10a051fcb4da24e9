#include "pipeline/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "core/errors.hpp"
#include "core/hash.hpp"
#include "deteval/evaluate.hpp"
#include "metrics/quality.hpp"
#include "pipeline/config.hpp"
#include "pipeline/dataset.hpp"
#include "pipeline/manifest.hpp"
#include "pipeline/report.hpp"
#include "pipeline/runner.hpp"

namespace framecast::pipe {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Resolved global state every command works from.
struct Ctx {
  nlohmann::json doc;
  fs::path out_root;
  std::vector<std::string> argv;
};

RunManifest manifest_for(const Ctx& ctx, const std::string& command) {
  RunManifest m;
  m.command = command;
  m.argv = ctx.argv;
  m.config = ctx.doc;
  return m;
}

fs::path pick(const std::string& flag, const fs::path& fallback) {
  return flag.empty() ? fallback : fs::path(flag);
}

enh::Task parse_task(const std::string& s) {
  if (s == "sr") return enh::Task::super_resolve;
  return enh::task_from_string(s);
}

enh::UpsamplerKind parse_upsampler(const std::string& s) {
  if (s == "trconv") return enh::UpsamplerKind::transposed_conv;
  if (s == "upconv") return enh::UpsamplerKind::nn_upsample_then_conv;
  return enh::upsampler_from_string(s);
}

DatasetIndex open_dataset(const fs::path& dir) { return load_dataset_index(dir); }

std::vector<std::vector<data::Frame>> window_targets(const DatasetIndex& idx,
                                                     const std::vector<WindowRef>& refs,
                                                     int resolution) {
  ClipCache cache(idx);
  std::vector<std::vector<data::Frame>> out;
  for (data::SequenceSample& w : materialize_windows(idx, cache, refs, resolution))
    out.push_back(std::move(w.targets));
  return out;
}

void check_window_geometry(const DatasetIndex& idx, const pred::PredictorConfig& cfg,
                           const fs::path& data_dir) {
  if (cfg.n_in != idx.data.n_in || cfg.n_out != idx.data.n_out ||
      cfg.final_resolution != idx.data.base_resolution)
    throw ConfigError("config window geometry (" + std::to_string(cfg.n_in) + "+" +
                      std::to_string(cfg.n_out) + " frames at " +
                      std::to_string(cfg.final_resolution) + "x) does not match the dataset at " +
                      data_dir.string());
}

// ===== commands =====

int cmd_make_data(const Ctx& ctx, const std::string& data_dir, bool force) {
  const fs::path dir = pick(data_dir, ctx.out_root / "data");
  if (!force && fs::exists(dir / "dataset.json"))
    throw ConfigError("dataset already exists at " + dir.string() + " (--force rebuilds it)");
  const Clock::time_point t0 = Clock::now();
  const DatasetIndex idx = make_dataset(dir, ctx.doc);
  RunManifest m = manifest_for(ctx, "make-data");
  m.seconds = seconds_since(t0);
  write_manifest(dir / "manifest.json", m);
  std::cout << "dataset: " << idx.clip_dirs.size() << " clips, " << idx.train.size()
            << " train / " << idx.test.size() << " test windows, base "
            << idx.data.base_resolution << "x" << idx.data.base_resolution << " (canvas "
            << idx.data.canvas << ") -> " << dir.string() << "\n";
  return 0;
}

int cmd_train_predictor(const Ctx& ctx, const std::string& data_dir, const std::string& out,
                        const std::string& resume) {
  const fs::path ddir = pick(data_dir, ctx.out_root / "data");
  const fs::path odir = pick(out, ctx.out_root / "predictor");
  const DatasetIndex idx = open_dataset(ddir);

  pred::PredictorState state =
      resume.empty() ? pred::PredictorState::build(predictor_config(ctx.doc), 0)
                     : pred::load_predictor(resume);
  check_window_geometry(idx, state.cfg, ddir);

  const data::DatasetSplit split = load_split(idx, idx.data.base_resolution);
  fs::create_directories(odir);
  const Clock::time_point t0 = Clock::now();
  pred::train_predictor(state, split, predictor_schedule(ctx.doc), loss_config(ctx.doc),
                        {odir});

  RunManifest m = manifest_for(ctx, "train-predictor");
  m.seconds = seconds_since(t0);
  m.add_input(ddir / "dataset.json");
  if (!resume.empty()) m.add_input(resume);
  write_manifest(odir / "manifest.json", m);
  std::cout << "predictor: stage " << state.stage << " (" << state.resolution() << "x"
            << state.resolution() << "), " << state.epochs_done << " epochs -> "
            << (odir / "final.fckpt").string() << "\n";
  return 0;
}

int cmd_train_enhancer(const Ctx& ctx, const std::string& task_str, const std::string& ups_str,
                       const std::string& data_dir, const std::string& out, int max_pairs) {
  const enh::Task task = parse_task(task_str);
  const enh::UpsamplerKind ups = parse_upsampler(ups_str);
  const enh::EnhancerConfig ecfg = enhancer_config(ctx.doc, task, ups);
  const std::string label = pipeline_label(ecfg);

  const fs::path ddir = pick(data_dir, ctx.out_root / "data");
  const fs::path odir = pick(out, ctx.out_root / ("enhancer_" + label));
  const DatasetIndex idx = open_dataset(ddir);
  const std::vector<enh::EnhancerSample> pairs =
      task == enh::Task::deblur ? deblur_pairs(idx, max_pairs) : sr_pairs(idx, max_pairs);

  enh::EnhancerState state = enh::EnhancerState::build(ecfg);
  fs::create_directories(odir);
  const Clock::time_point t0 = Clock::now();
  enh::train_enhancer(state, pairs, enhancer_epochs(ctx.doc), loss_config(ctx.doc), {odir});

  RunManifest m = manifest_for(ctx, "train-enhancer");
  m.seconds = seconds_since(t0);
  m.add_input(ddir / "dataset.json");
  write_manifest(odir / "manifest.json", m);
  std::cout << "enhancer (" << label << "): " << pairs.size() << " pairs, " << state.epochs_done
            << " epochs -> " << (odir / "final.fckpt").string() << "\n";
  return 0;
}

PipelineSpec spec_from_flags(const Ctx& ctx, const std::string& label,
                             const std::string& predictor, const std::string& enhancer) {
  PipelineSpec spec;
  spec.label = label;
  spec.predictor_ckpt = pick(predictor, ctx.out_root / "predictor" / "final.fckpt");
  if (label != "plain")
    spec.enhancer_ckpt = pick(enhancer, ctx.out_root / ("enhancer_" + label) / "final.fckpt");
  else if (!enhancer.empty())
    spec.enhancer_ckpt = enhancer;
  return spec;
}

int cmd_predict(const Ctx& ctx, const std::string& label, const std::string& predictor,
                const std::string& enhancer, const std::string& data_dir, const std::string& out,
                int limit) {
  const PipelineSpec spec = spec_from_flags(ctx, label, predictor, enhancer);
  LoadedPipeline lp = load_pipeline(spec);
  const fs::path ddir = pick(data_dir, ctx.out_root / "data");
  const fs::path odir = pick(out, ctx.out_root / ("predictions_" + label));
  const DatasetIndex idx = open_dataset(ddir);
  PipelineRun run = run_pipeline(lp, idx, limit);

  PredictionSet ps;
  ps.pipeline = label;
  ps.resolution = lp.output_resolution();
  ps.fps = idx.data.fps;
  ps.dataset = ddir.string();
  ps.windows = run.windows;
  ps.models["predictor"] = hex64(hash_file(spec.predictor_ckpt.string()));
  if (!spec.enhancer_ckpt.empty())
    ps.models["enhancer"] = hex64(hash_file(spec.enhancer_ckpt.string()));
  ps.predicted = std::move(run.predicted);
  save_predictions(odir, ps);

  RunManifest m = manifest_for(ctx, "predict");
  m.seconds = run.seconds;
  m.add_input(ddir / "dataset.json");
  m.add_input(spec.predictor_ckpt);
  if (!spec.enhancer_ckpt.empty()) m.add_input(spec.enhancer_ckpt);
  write_manifest(odir / "manifest.json", m);
  std::cout << "predict (" << label << "): " << ps.windows.size() << " windows at "
            << ps.resolution << "x" << ps.resolution << " -> " << odir.string() << " ("
            << fmt_double(run.seconds, 2) << " s)\n";
  return 0;
}

int cmd_enhance(const Ctx& ctx, const std::string& in, const std::string& ckpt,
                const std::string& out) {
  PredictionSet ps = load_predictions(in);
  if (ps.pipeline != "plain")
    throw ConfigError("enhance expects a plain prediction set, got '" + ps.pipeline + "'");
  enh::EnhancerState es = enh::load_enhancer(ckpt);
  const std::string label = pipeline_label(es.cfg);
  const fs::path odir = pick(out, ctx.out_root / ("predictions_" + label));

  const Clock::time_point t0 = Clock::now();
  for (std::vector<data::Frame>& frames : ps.predicted) frames = es.enhance(frames);
  const double seconds = seconds_since(t0);

  ps.pipeline = label;
  ps.resolution *= es.cfg.scale_factor();
  ps.models["enhancer"] = hex64(hash_file(ckpt));
  save_predictions(odir, ps);

  RunManifest m = manifest_for(ctx, "enhance");
  m.seconds = seconds;
  m.add_input(fs::path(in) / "predictions.json");
  m.add_input(ckpt);
  write_manifest(odir / "manifest.json", m);
  std::cout << "enhance (" << label << "): " << ps.predicted.size() << " windows at "
            << ps.resolution << "x" << ps.resolution << " -> " << odir.string() << " ("
            << fmt_double(seconds, 2) << " s)\n";
  return 0;
}

int cmd_eval_metrics(const std::string& pred_dir, const std::string& data_dir,
                     const std::string& out) {
  const PredictionSet ps = load_predictions(pred_dir);
  const fs::path ddir = pick(data_dir, ps.dataset);
  const DatasetIndex idx = open_dataset(ddir);
  const std::vector<std::vector<data::Frame>> reference =
      window_targets(idx, ps.windows, ps.resolution);
  const qm::MetricReport report = qm::per_frame_report(ps.predicted, reference, ps.pipeline);

  const fs::path file = pick(out, fs::path(pred_dir) / "metrics.csv");
  write_metrics_csv({report}, file);
  std::cout << summary_table({report}, {}) << "metrics -> " << file.string() << "\n";
  return 0;
}

det::APReport detection_report(const Ctx& ctx, const PredictionSet& ps, const fs::path& ddir,
                               const std::string& detections_csv) {
  const DatasetIndex idx = open_dataset(ddir);
  const std::vector<std::vector<data::Frame>> real_base =
      window_targets(idx, ps.windows, idx.data.base_resolution);
  const EvalConfig ev = eval_config(ctx.doc);
  std::unique_ptr<det::IDetector> pred_det;
  if (detections_csv.empty())
    pred_det = std::make_unique<det::ToyDetector>(ev.detector);
  else
    pred_det = std::make_unique<det::ExternalFileDetector>(detections_csv);
  det::ToyDetector ref_det(ev.detector);
  return det::evaluate_detection(ps.pipeline, ps.predicted, real_base, *pred_det, ref_det,
                                 ev.iou_threshold, ev.eleven_point);
}

int cmd_eval_detection(const Ctx& ctx, const std::string& pred_dir, const std::string& data_dir,
                       const std::string& out, const std::string& detections_csv) {
  const PredictionSet ps = load_predictions(pred_dir);
  const det::APReport report =
      detection_report(ctx, ps, pick(data_dir, ps.dataset), detections_csv);

  const fs::path file = pick(out, fs::path(pred_dir) / "ap.csv");
  write_ap_csv({report}, file);
  bool any_defined = false;
  for (const det::ApRow& r : report.rows) any_defined = any_defined || r.ap.has_value();
  if (!any_defined)
    std::cout << "warning: no ground-truth boxes on any test window, AP is undefined\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-16s %-10s %5s %10s %6s %6s %6s\n", "pipeline", "class",
                "step", "ap", "tp", "fp", "fn");
  std::cout << line;
  for (const det::ApRow& r : report.rows) {
    std::snprintf(line, sizeof line, "%-16s %-10s %5d %10s %6d %6d %6d\n",
                  report.pipeline.c_str(), r.cls.c_str(), r.step,
                  r.ap ? fmt_double(*r.ap, 4).c_str() : "-", r.tp, r.fp, r.fn);
    std::cout << line;
  }
  std::cout << "detection -> " << file.string() << "\n";
  return 0;
}

int cmd_benchmark(const Ctx& ctx, const std::string& label, const std::string& predictor,
                  const std::string& enhancer, const std::string& data_dir, int trials) {
  LoadedPipeline lp = load_pipeline(spec_from_flags(ctx, label, predictor, enhancer));
  const DatasetIndex idx = open_dataset(pick(data_dir, ctx.out_root / "data"));
  if (idx.test.empty()) throw MissingDataError("dataset has no test windows");
  ClipCache cache(idx);
  const std::vector<data::SequenceSample> window =
      materialize_windows(idx, cache, {idx.test.front()}, idx.data.base_resolution);
  const BenchResult b = benchmark_inference(lp, window.front().inputs, trials);
  const int res = lp.output_resolution();
  std::cout << "benchmark (" << label << "): mean " << fmt_double(b.mean_seconds, 4)
            << " s/window, std " << fmt_double(b.std_seconds, 4) << " s, trials " << b.trials
            << " (output " << res << "x" << res << ", " << idx.data.n_out << " frames)\n";
  return 0;
}

int cmd_report(const Ctx& ctx, const std::vector<std::string>& pred_dirs,
               const std::string& data_dir, const std::string& out, bool no_detection) {
  std::vector<qm::MetricReport> metrics;
  std::vector<det::APReport> aps;
  for (const std::string& dir : pred_dirs) {
    const PredictionSet ps = load_predictions(dir);
    const fs::path ddir = pick(data_dir, ps.dataset);
    const DatasetIndex idx = open_dataset(ddir);
    metrics.push_back(qm::per_frame_report(
        ps.predicted, window_targets(idx, ps.windows, ps.resolution), ps.pipeline));
    if (!no_detection) aps.push_back(detection_report(ctx, ps, ddir, ""));
  }

  bool any_defined = false;
  for (const det::APReport& a : aps)
    for (const det::ApRow& r : a.rows) any_defined = any_defined || r.ap.has_value();
  if (!aps.empty() && !any_defined)
    std::cout << "warning: AP is undefined on every pipeline, reporting pixel metrics only\n";

  const fs::path odir = pick(out, ctx.out_root / "report");
  const std::vector<fs::path> files = write_full_report(odir, metrics, aps);
  RunManifest m = manifest_for(ctx, "report");
  for (const std::string& dir : pred_dirs) m.add_input(fs::path(dir) / "predictions.json");
  write_manifest(odir / "manifest.json", m);

  std::cout << summary_table(metrics, aps);
  for (const fs::path& f : files) std::cout << "wrote " << f.string() << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"two-stage traffic scene video prediction: a progressively grown prediction GAN "
               "followed by GAN frame enhancement (deblur or 4x super-resolution)"};
  app.set_version_flag("--version", std::string("framecast ") + kVersion);
  app.require_subcommand(1);

  std::string config_file, out_dir_flag, seed_flag;
  std::vector<std::string> sets;
  app.add_option("--config", config_file, "JSON config file merged over built-in defaults")
      ->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override one config value, section.key=value")->type_size(1);
  app.add_option("--seed", seed_flag, "override the top-level seed");
  app.add_option("--out-dir", out_dir_flag,
                 "root for outputs (default: FRAMECAST_OUT_ROOT or the config's out_dir)");

  // make-data
  auto* sc_data = app.add_subcommand("make-data", "synthesize clips and split them");
  std::string md_dir;
  bool md_force = false;
  sc_data->add_option("--data-dir", md_dir, "dataset directory (default OUT/data)");
  sc_data->add_flag("--force", md_force, "rebuild over an existing dataset");

  // train-predictor
  auto* sc_tp = app.add_subcommand("train-predictor", "train the progressive prediction GAN");
  std::string tp_data, tp_out, tp_resume;
  sc_tp->add_option("--data-dir", tp_data, "dataset directory (default OUT/data)");
  sc_tp->add_option("--out", tp_out, "output directory (default OUT/predictor)");
  sc_tp->add_option("--resume", tp_resume, "continue from a checkpoint")
      ->check(CLI::ExistingFile);

  // train-enhancer
  auto* sc_te = app.add_subcommand("train-enhancer", "train a deblur or super-resolution GAN");
  std::string te_task, te_ups = "trconv", te_data, te_out;
  int te_max_pairs = 0;
  sc_te->add_option("--task", te_task, "deblur or sr")->required();
  sc_te->add_option("--upsampler", te_ups, "deblur decoder tail: trconv or upconv");
  sc_te->add_option("--data-dir", te_data, "dataset directory (default OUT/data)");
  sc_te->add_option("--out", te_out, "output directory (default OUT/enhancer_<label>)");
  sc_te->add_option("--max-pairs", te_max_pairs, "cap the training pairs (0 = all)");

  // predict
  auto* sc_pr = app.add_subcommand("predict", "run a pipeline over the test windows");
  std::string pr_label = "plain", pr_pred, pr_enh, pr_data, pr_out;
  int pr_limit = 0;
  sc_pr->add_option("--pipeline", pr_label, "plain, deblur_trconv, deblur_upconv or sr");
  sc_pr->add_option("--predictor", pr_pred, "predictor checkpoint");
  sc_pr->add_option("--enhancer", pr_enh, "enhancer checkpoint");
  sc_pr->add_option("--data-dir", pr_data, "dataset directory (default OUT/data)");
  sc_pr->add_option("--out", pr_out, "output directory (default OUT/predictions_<label>)");
  sc_pr->add_option("--limit", pr_limit, "test windows to run (0 = all)");

  // enhance
  auto* sc_en = app.add_subcommand("enhance", "apply an enhancer to a plain prediction set");
  std::string en_in, en_ckpt, en_out;
  sc_en->add_option("--in", en_in, "plain prediction directory")->required();
  sc_en->add_option("--enhancer", en_ckpt, "enhancer checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  sc_en->add_option("--out", en_out, "output directory (default OUT/predictions_<label>)");

  // eval-metrics
  auto* sc_em = app.add_subcommand("eval-metrics", "pixel metrics against the references");
  std::string em_pred, em_data, em_out;
  sc_em->add_option("--pred", em_pred, "prediction directory")->required();
  sc_em->add_option("--data-dir", em_data, "dataset directory (default: recorded in the set)");
  sc_em->add_option("--out", em_out, "CSV path (default <pred>/metrics.csv)");

  // eval-detection
  auto* sc_ed = app.add_subcommand("eval-detection",
                                   "average precision against detections on real frames");
  std::string ed_pred, ed_data, ed_out, ed_csv;
  sc_ed->add_option("--pred", ed_pred, "prediction directory")->required();
  sc_ed->add_option("--data-dir", ed_data, "dataset directory (default: recorded in the set)");
  sc_ed->add_option("--out", ed_out, "CSV path (default <pred>/ap.csv)");
  sc_ed->add_option("--detections", ed_csv,
                    "CSV of externally computed detections for the predicted frames")
      ->check(CLI::ExistingFile);

  // benchmark
  auto* sc_be = app.add_subcommand("benchmark", "time pipeline inference on one window");
  std::string be_label = "plain", be_pred, be_enh, be_data;
  int be_trials = 5;
  sc_be->add_option("--pipeline", be_label, "plain, deblur_trconv, deblur_upconv or sr");
  sc_be->add_option("--predictor", be_pred, "predictor checkpoint");
  sc_be->add_option("--enhancer", be_enh, "enhancer checkpoint");
  sc_be->add_option("--data-dir", be_data, "dataset directory (default OUT/data)");
  sc_be->add_option("--trials", be_trials, "timed repetitions")->check(CLI::PositiveNumber);

  // report
  auto* sc_re = app.add_subcommand("report", "CSVs, charts and a summary for prediction sets");
  std::vector<std::string> re_preds;
  std::string re_data, re_out;
  bool re_nodet = false;
  sc_re->add_option("--pred", re_preds, "prediction directory (repeatable)")
      ->required()
      ->type_size(1);
  sc_re->add_option("--data-dir", re_data, "dataset directory (default: recorded in each set)");
  sc_re->add_option("--out", re_out, "report directory (default OUT/report)");
  sc_re->add_flag("--no-detection", re_nodet, "skip the detection evaluation");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Ctx ctx;
    ctx.doc = resolve_config(
        config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file), sets);
    if (!seed_flag.empty()) apply_override(ctx.doc, "seed=" + seed_flag);
    const char* env_root = std::getenv("FRAMECAST_OUT_ROOT");
    ctx.out_root = !out_dir_flag.empty() ? fs::path(out_dir_flag)
                   : env_root            ? fs::path(env_root)
                                         : fs::path(ctx.doc.at("out_dir").get<std::string>());
    ctx.argv.assign(argv, argv + argc);

    if (sc_data->parsed()) return cmd_make_data(ctx, md_dir, md_force);
    if (sc_tp->parsed()) return cmd_train_predictor(ctx, tp_data, tp_out, tp_resume);
    if (sc_te->parsed())
      return cmd_train_enhancer(ctx, te_task, te_ups, te_data, te_out, te_max_pairs);
    if (sc_pr->parsed())
      return cmd_predict(ctx, pr_label, pr_pred, pr_enh, pr_data, pr_out, pr_limit);
    if (sc_en->parsed()) return cmd_enhance(ctx, en_in, en_ckpt, en_out);
    if (sc_em->parsed()) return cmd_eval_metrics(em_pred, em_data, em_out);
    if (sc_ed->parsed()) return cmd_eval_detection(ctx, ed_pred, ed_data, ed_out, ed_csv);
    if (sc_be->parsed()) return cmd_benchmark(ctx, be_label, be_pred, be_enh, be_data, be_trials);
    if (sc_re->parsed()) return cmd_report(ctx, re_preds, re_data, re_out, re_nodet);
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace framecast::pipe
