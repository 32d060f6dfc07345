#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtfnet/cli.hpp"
#include "rtfnet/cvnn/checkpoint.hpp"
#include "rtfnet/cvnn/trainer.hpp"
#include "rtfnet/cvnn/unet.hpp"
#include "rtfnet/dataset.hpp"
#include "rtfnet/dataset_json.hpp"
#include "rtfnet/errors.hpp"
#include "rtfnet/eval.hpp"
#include "rtfnet/kernel_baseline.hpp"
#include "rtfnet/modal_sim.hpp"
#include "rtfnet/plot.hpp"

namespace rtfnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::size_t threads = 1;
  std::vector<std::string> argv;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_run_json(const fs::path& dir, const std::string& command, const json& config, std::uint64_t seed,
                    const Common& common, std::chrono::steady_clock::time_point start, json extra = json::object()) {
  json run;
  run["command"] = command;
  run["argv"] = common.argv;
  run["config"] = config;
  run["seed"] = seed;
  run["threads"] = common.threads;
  run["versions"] = {{"rtfnet", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                   "." + std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__},
                     {"cxx_standard", __cplusplus}};
  run["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& [k, v] : extra.items()) run[k] = v;
  write_json(dir / "run.json", run);
}

std::string fmt_freq(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", f);
  return buf;
}

std::vector<SampleRecord> pick_split(const Dataset& ds, const std::string& split) {
  if (split == "validation") return ds.validation;
  if (split == "train") return ds.train;
  std::vector<SampleRecord> all = ds.train;
  all.insert(all.end(), ds.validation.begin(), ds.validation.end());
  return all;
}

void cap_rooms(std::vector<SampleRecord>& records, std::size_t max_rooms) {
  if (max_rooms > 0 && records.size() > max_rooms) records.resize(max_rooms);
}

std::unique_ptr<Reconstructor> make_method(const std::string& name, double lambda,
                                           const std::optional<std::string>& checkpoint) {
  if (name == "kernel") return std::make_unique<KernelReconstructor>(lambda);
  if (name == "cvnn") {
    if (!checkpoint) throw ArgumentError("method cvnn needs --checkpoint");
    return std::make_unique<CvnnReconstructor>(cvnn::load_model<float>(*checkpoint));
  }
  throw ArgumentError("unknown method '" + name + "' (expected kernel or cvnn)");
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::vector<double> room{4.8, 5.4, 2.4};
  std::vector<double> source{2.1, 2.0, 1.2};
  double t60 = 1.0;
  std::vector<double> freqs{100.0};
  std::vector<std::size_t> grid{32, 32};
  std::optional<double> z_plane;
  double f_cutoff = kDefaultModalCutoffHz;
  double c = kDefaultSpeedOfSound;
  std::string damping = "wavenumber";
  std::size_t mics = 0;
  double lambda = kDefaultKernelLambda;
  std::optional<std::string> checkpoint;
  std::uint64_t seed = 0;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  app.add_option("--room", a.room, "Room dimensions Lx Ly Lz [m]")->expected(3)->capture_default_str();
  app.add_option("--source", a.source, "Source position x y z [m]")->expected(3)->capture_default_str();
  app.add_option("--t60", a.t60, "Reverberation time [s]")->capture_default_str();
  app.add_option("--freq", a.freqs, "Frequencies [Hz]")->delimiter(',')->capture_default_str();
  app.add_option("--grid", a.grid, "Grid points W H")->expected(2)->capture_default_str();
  app.add_option("--z-plane", a.z_plane, "Measurement plane height [m] (default Lz/2)");
  app.add_option("--f-cutoff", a.f_cutoff, "Highest modal frequency kept [Hz]")->capture_default_str();
  app.add_option("--c", a.c, "Speed of sound [m/s]")->capture_default_str();
  app.add_option("--damping", a.damping, "Damping term: wavenumber or literal")->capture_default_str();
  app.add_option("--mics", a.mics, "Observed points; also writes mask and kernel reconstruction (0 = off)")
      ->capture_default_str();
  app.add_option("--lambda", a.lambda, "Kernel regularization")->capture_default_str();
  app.add_option("--checkpoint", a.checkpoint, "Network checkpoint for a cvnn reconstruction");
  app.add_option("--seed", a.seed, "Mask seed")->capture_default_str();
  app.add_option("--out", a.out, "Output directory")->required();
}

void run_simulate(const SimulateArgs& a, const Common& common) {
  const auto start = std::chrono::steady_clock::now();
  RoomSpec room;
  room.lx = a.room[0];
  room.ly = a.room[1];
  room.lz = a.room[2];
  room.t60 = a.t60;
  room.source = {a.source[0], a.source[1], a.source[2]};
  room.z_plane = a.z_plane.value_or(room.lz / 2.0);
  room.grid_w = a.grid[0];
  room.grid_h = a.grid[1];
  room.speed_of_sound = a.c;
  room.validate();
  std::vector<double> freqs = a.freqs;
  std::sort(freqs.begin(), freqs.end());
  SynthesisOptions opts;
  opts.f_cutoff = a.f_cutoff;
  opts.damping = parse_damping(a.damping);

  const fs::path out(a.out);
  ensure_dir(out);
  SampleRecord rec;
  rec.room = room;
  rec.field = synthesize_field(room, freqs, opts);
  rec.field.room_id = "field";
  rec.seed = a.seed;
  if (a.mics > 0) {
    Rng rng(a.seed);
    rec.mask = sample_mask(rng, a.mics, room.grid_w, room.grid_h);
  } else {
    rec.mask = MicMask::all(room.grid_w, room.grid_h);
  }
  write_record(out / "field.mdf", rec);
  json config = {{"room", a.room}, {"source", a.source}, {"t60", a.t60}, {"freqs", freqs},
                 {"grid", a.grid}, {"z_plane", room.z_plane}, {"f_cutoff", a.f_cutoff},
                 {"speed_of_sound", a.c}, {"damping", a.damping}, {"mics", a.mics},
                 {"lambda", a.lambda}, {"checkpoint", a.checkpoint ? json(*a.checkpoint) : json(nullptr)}};
  write_json(out / "field.json", config);

  std::optional<FieldGrid> kernel_est, cvnn_est;
  if (a.mics > 0) {
    kernel_est = reconstruct_field(rec, a.lambda, common.threads);
    if (a.checkpoint) {
      CvnnReconstructor net(cvnn::load_model<float>(*a.checkpoint));
      cvnn_est = net.reconstruct(rec);
    }
  }
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const std::string tag = "f" + fmt_freq(freqs[k]);
    write_field_images(out / ("truth_" + tag), rec.field, k, a.mics > 0 ? &rec.mask.mask : nullptr);
    if (kernel_est) write_field_images(out / ("kernel_" + tag), *kernel_est, k);
    if (cvnn_est) write_field_images(out / ("cvnn_" + tag), *cvnn_est, k);
  }
  json extra = json::object();
  if (kernel_est) {
    json nm = json::array();
    for (std::size_t k = 0; k < freqs.size(); ++k) {
      nm.push_back({{"freq_hz", freqs[k]}, {"kernel_nmse_complex_db", nmse_complex(*kernel_est, rec.field, k)},
                    {"kernel_nmse_abs_db", nmse_abs(*kernel_est, rec.field, k)}});
    }
    extra["nmse"] = nm;
  }
  write_run_json(out, "simulate", config, a.seed, common, start, extra);
  std::cout << "wrote " << (out / "field.mdf").string() << " and images for " << freqs.size() << " frequencies\n";
}

// ---- gen-dataset ---------------------------------------------------------

struct GenArgs {
  GenConfig config;
  std::vector<std::size_t> grid{32, 32};
  std::string damping = "wavenumber";
  std::string out;
  bool force = false;
};

void add_gen(CLI::App& app, GenArgs& a) {
  auto& c = a.config;
  app.add_option("--n-rooms", c.n_rooms, "Number of rooms")->capture_default_str();
  app.add_option("--split", c.split, "Training fraction")->capture_default_str();
  app.add_option("--t60", c.t60_choices, "T60 levels [s]")->delimiter(',')->capture_default_str();
  app.add_option("--mics", c.mic_choices, "Microphone counts")->delimiter(',')->capture_default_str();
  app.add_option("--k", c.k, "Frequencies per record")->capture_default_str();
  app.add_option("--f-lo", c.f_lo, "Lowest frequency [Hz]")->capture_default_str();
  app.add_option("--f-hi", c.f_hi, "Highest frequency [Hz]")->capture_default_str();
  app.add_option("--f-cutoff", c.f_cutoff, "Highest modal frequency kept [Hz]")->capture_default_str();
  app.add_option("--grid", a.grid, "Grid points W H")->expected(2)->capture_default_str();
  app.add_option("--c", c.speed_of_sound, "Speed of sound [m/s]")->capture_default_str();
  app.add_option("--damping", a.damping, "Damping term: wavenumber or literal")->capture_default_str();
  app.add_option("--seed", c.seed, "Base seed")->capture_default_str();
  app.add_option("--out", a.out, "Dataset directory")->required();
  app.add_flag("--force", a.force, "Overwrite a non-empty directory");
}

void run_gen(GenArgs a, const Common& common) {
  const auto start = std::chrono::steady_clock::now();
  a.config.grid_w = a.grid[0];
  a.config.grid_h = a.grid[1];
  a.config.damping = parse_damping(a.damping);
  a.config.validate();
  const fs::path out(a.out);
  if (fs::exists(out) && !fs::is_empty(out) && !a.force) {
    throw ArgumentError(out.string() + " is not empty; pass --force to overwrite");
  }
  const Dataset ds = generate_dataset(a.config, common.threads);
  ensure_dir(out);
  save_dataset(out, ds, a.force);
  write_run_json(out, "gen-dataset", to_json(a.config), a.config.seed, common, start);
  std::cout << "wrote " << ds.train.size() << " training and " << ds.validation.size() << " validation rooms to "
            << out.string() << "\n";
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  cvnn::TrainConfig config;
  std::vector<std::size_t> widths{128, 256, 512, 1024};
  bool no_shuffle = false;
  double target_ratio = 0.0;
  std::size_t checkpoint_every = 10;
  std::optional<std::string> resume;
  std::string data;
  std::string out;
  bool quiet = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto& c = a.config;
  app.add_option("--data", a.data, "Dataset directory")->required();
  app.add_option("--out", a.out, "Output directory")->required();
  app.add_option("--lr", c.lr, "Adam learning rate")->capture_default_str();
  app.add_option("--batch", c.batch, "Mini-batch size")->capture_default_str();
  app.add_option("--max-epochs", c.max_epochs, "Epoch limit")->capture_default_str();
  app.add_option("--patience", c.patience, "Early-stop patience [epochs]")->capture_default_str();
  app.add_option("--beta1", c.beta1, "Adam beta1")->capture_default_str();
  app.add_option("--beta2", c.beta2, "Adam beta2")->capture_default_str();
  app.add_option("--eps", c.eps, "Adam epsilon")->capture_default_str();
  app.add_option("--seed", c.seed, "Initialization and shuffling seed")->capture_default_str();
  app.add_flag("--no-shuffle", a.no_shuffle, "Keep record order fixed");
  app.add_flag("--resample-masks", c.resample_masks, "Draw fresh masks every epoch");
  app.add_option("--mics", c.mic_choices, "Mic counts for --resample-masks")->delimiter(',')->capture_default_str();
  app.add_option("--widths", a.widths, "Encoder filter counts")->delimiter(',')->capture_default_str();
  app.add_option("--target-ratio", a.target_ratio,
                 "Stop once train loss < ratio x first-epoch loss (0 = off)")
      ->capture_default_str();
  app.add_option("--checkpoint-every", a.checkpoint_every, "Epochs between state checkpoints")
      ->capture_default_str();
  app.add_option("--resume", a.resume, "Continue from a state checkpoint");
  app.add_flag("--quiet", a.quiet, "No per-epoch output");
}

void run_train(TrainArgs a, const Common& common) {
  const auto start = std::chrono::steady_clock::now();
  a.config.shuffle = !a.no_shuffle;
  a.config.validate();
  if (a.target_ratio < 0.0 || a.target_ratio >= 1.0) throw ArgumentError("--target-ratio must lie in [0, 1)");
  if (a.checkpoint_every == 0) throw ArgumentError("--checkpoint-every must be positive");
  const Dataset ds = load_dataset(a.data);
  const fs::path out(a.out);
  ensure_dir(out);

  std::optional<cvnn::Checkpoint> resume;
  cvnn::UNetSpec spec = cvnn::UNetSpec::with_widths(ds.freqs.size(), a.widths);
  if (a.resume) {
    resume = cvnn::read_checkpoint(*a.resume);
    spec = cvnn::unet_spec_from_json(resume->meta.at("unet"));
  }
  cvnn::UNet<float> model(spec);
  Rng init_rng(derive_seed(a.config.seed, 1));
  model.initialize(init_rng);
  cvnn::Trainer<float> trainer(model, a.config, ds.train, ds.validation);
  if (resume) trainer.restore(*resume);

  auto write_history = [&] {
    std::string csv = "epoch,train_loss,val_loss\n";
    char buf[96];
    for (const auto& e : trainer.history().epochs) {
      std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss);
      csv += buf;
    }
    write_text_file(out / "history.csv", csv);
  };
  const double first = trainer.history().epochs.empty() ? 0.0 : trainer.history().epochs.front().train_loss;
  trainer.fit([&](const cvnn::EpochStats& s) {
    if (!a.quiet) {
      std::printf("epoch %zu  train %.6g  val %.6g\n", s.epoch, s.train_loss, s.val_loss);
      std::fflush(stdout);
    }
    if (s.epoch % a.checkpoint_every == 0) {
      cvnn::write_checkpoint(out / "state.ckpt", trainer.state());
      write_history();
    }
    const double base = first > 0.0 ? first : trainer.history().epochs.front().train_loss;
    return !(a.target_ratio > 0.0 && s.train_loss < a.target_ratio * base);
  });

  write_history();
  cvnn::write_checkpoint(out / "state.ckpt", trainer.state());
  cvnn::Checkpoint best;
  cvnn::add_model(best, model);
  best.meta["best_epoch"] = trainer.history().best_epoch;
  best.meta["best_val"] = trainer.history().best_val;
  cvnn::write_checkpoint(out / "model.ckpt", best);

  json config = cvnn::to_json(a.config);
  config["widths"] = a.widths;
  config["target_ratio"] = a.target_ratio;
  config["data"] = a.data;
  config["resume"] = a.resume ? json(*a.resume) : json(nullptr);
  const auto& h = trainer.history();
  write_run_json(out, "train", config, a.config.seed, common, start,
                 {{"stop_reason", h.stop_reason},
                  {"epochs", h.epochs.size()},
                  {"best_epoch", h.best_epoch},
                  {"best_val_loss", h.best_val},
                  {"real_parameters", model.real_parameter_count()}});
  std::cout << "stopped after " << h.epochs.size() << " epochs (" << h.stop_reason << "), best epoch "
            << h.best_epoch << "\n";
}

// ---- eval / compare ------------------------------------------------------

struct EvalArgs {
  std::string data;
  std::string out;
  std::string method = "kernel";
  std::vector<std::string> methods{"kernel"};
  std::optional<std::string> checkpoint;
  double lambda = kDefaultKernelLambda;
  std::string split = "validation";
  std::string sweep = "both";
  std::vector<std::size_t> mics = kDefaultMicCounts;
  std::size_t m = 55;
  double t60 = 1.0;
  std::vector<double> t60_levels = kDefaultT60Levels;
  std::size_t max_rooms = 0;
  std::uint64_t seed = 0;
};

void add_eval_common(CLI::App& app, EvalArgs& a) {
  app.add_option("--data", a.data, "Dataset directory")->required();
  app.add_option("--out", a.out, "Output directory")->required();
  app.add_option("--checkpoint", a.checkpoint, "Network checkpoint (cvnn)");
  app.add_option("--lambda", a.lambda, "Kernel regularization")->capture_default_str();
  app.add_option("--split", a.split, "validation, train or all")
      ->check(CLI::IsMember({"validation", "train", "all"}))
      ->capture_default_str();
  app.add_option("--max-rooms", a.max_rooms, "Use at most this many rooms (0 = all)")->capture_default_str();
}

void run_eval(const EvalArgs& a, const Common& common) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = load_dataset(a.data);
  auto records = pick_split(ds, a.split);
  cap_rooms(records, a.max_rooms);
  auto method = make_method(a.method, a.lambda, a.checkpoint);
  std::vector<double> levels;
  for (const auto& r : records) {
    if (std::find(levels.begin(), levels.end(), r.room.t60) == levels.end()) levels.push_back(r.room.t60);
  }
  std::sort(levels.begin(), levels.end());
  std::vector<MetricReport> reports;
  for (double level : levels) {
    MetricReport rep = evaluate(*method, select_t60(records, level), common.threads);
    rep.sweep = "t60";
    rep.sweep_key = level;
    reports.push_back(std::move(rep));
  }
  const fs::path out(a.out);
  ensure_dir(out);
  write_text_file(out / "metrics.csv", metrics_csv(reports));
  json config = {{"data", a.data}, {"method", a.method}, {"lambda", a.lambda}, {"split", a.split},
                 {"max_rooms", a.max_rooms},
                 {"checkpoint", a.checkpoint ? json(*a.checkpoint) : json(nullptr)}};
  write_run_json(out, "eval", config, ds.config.seed, common, start);
  for (const auto& r : reports) {
    std::printf("%s T60=%gs rooms=%zu  NMSE complex %.2f dB  abs %.2f dB\n", r.method.c_str(), r.sweep_key,
                r.n_rooms, r.mean_nmse_complex(), r.mean_nmse_abs());
  }
}

void run_compare(const EvalArgs& a, const Common& common) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = load_dataset(a.data);
  const auto records = pick_split(ds, a.split);
  std::vector<MetricReport> reports;
  for (const auto& name : a.methods) {
    auto method = make_method(name, a.lambda, a.checkpoint);
    if (a.sweep == "t60" || a.sweep == "both") {
      std::vector<SampleRecord> pool;
      for (double level : a.t60_levels) {
        auto subset = select_t60(records, level);
        cap_rooms(subset, a.max_rooms);
        pool.insert(pool.end(), subset.begin(), subset.end());
      }
      auto r = sweep_t60(*method, pool, a.t60_levels, a.m, a.seed, common.threads);
      reports.insert(reports.end(), r.begin(), r.end());
    }
    if (a.sweep == "mics" || a.sweep == "both") {
      auto subset = select_t60(records, a.t60);
      if (subset.empty()) throw DataError("no records at T60 = " + fmt_freq(a.t60) + " s for the mic sweep");
      cap_rooms(subset, a.max_rooms);
      auto r = sweep_mics(*method, subset, a.mics, a.seed, common.threads);
      reports.insert(reports.end(), r.begin(), r.end());
    }
  }
  const fs::path out(a.out);
  ensure_dir(out);
  write_text_file(out / "metrics.csv", metrics_csv(reports));
  write_metric_plots(out / "plots", reports);
  json config = {{"data", a.data},       {"methods", a.methods}, {"lambda", a.lambda},
                 {"split", a.split},     {"sweep", a.sweep},     {"mics", a.mics},
                 {"m", a.m},             {"t60", a.t60},         {"t60_levels", a.t60_levels},
                 {"max_rooms", a.max_rooms},
                 {"checkpoint", a.checkpoint ? json(*a.checkpoint) : json(nullptr)}};
  write_run_json(out, "compare", config, a.seed, common, start);
  for (const auto& r : reports) {
    std::printf("%-6s %-4s %-5g rooms=%-4zu NMSE complex %.2f dB  abs %.2f dB\n", r.method.c_str(),
                r.sweep.c_str(), r.sweep_key, r.n_rooms, r.mean_nmse_complex(), r.mean_nmse_abs());
  }
}

// ---- plots ---------------------------------------------------------------

struct PlotArgs {
  std::string metrics;
  std::string out;
};

void run_plots(const PlotArgs& a, const Common& common) {
  const auto start = std::chrono::steady_clock::now();
  const auto reports = parse_metrics_csv(read_text_file(a.metrics));
  const fs::path out(a.out);
  ensure_dir(out);
  const auto files = write_metric_plots(out, reports);
  json names = json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  write_run_json(out, "plots", {{"metrics", a.metrics}}, 0, common, start, {{"files", names}});
  std::cout << "wrote " << files.size() << " plots to " << out.string() << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Room transfer function reconstruction toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with one [subcommand] section per command; command-line flags take precedence");
  Common common;
  for (int i = 0; i < argc; ++i) common.argv.emplace_back(argv[i]);
  app.add_option("--threads", common.threads, "Worker thread cap")->capture_default_str()->check(CLI::PositiveNumber);

  SimulateArgs sim;
  GenArgs gen;
  TrainArgs train;
  EvalArgs eval_args;
  EvalArgs compare_args;
  PlotArgs plot_args;

  auto* sim_cmd = app.add_subcommand("simulate", "Synthesize one room's field and write images");
  add_simulate(*sim_cmd, sim);
  auto* gen_cmd = app.add_subcommand("gen-dataset", "Generate a simulated dataset");
  add_gen(*gen_cmd, gen);
  auto* train_cmd = app.add_subcommand("train", "Train the complex U-Net");
  add_train(*train_cmd, train);
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate one method on a dataset with its stored masks");
  add_eval_common(*eval_cmd, eval_args);
  eval_cmd->add_option("--method", eval_args.method, "kernel or cvnn")->capture_default_str();
  auto* cmp_cmd = app.add_subcommand("compare", "T60 and microphone-count sweeps for several methods");
  add_eval_common(*cmp_cmd, compare_args);
  cmp_cmd->add_option("--methods", compare_args.methods, "Methods to compare")->delimiter(',')->capture_default_str();
  cmp_cmd->add_option("--sweep", compare_args.sweep, "t60, mics or both")
      ->check(CLI::IsMember({"t60", "mics", "both"}))
      ->capture_default_str();
  cmp_cmd->add_option("--mics", compare_args.mics, "Mic counts for the mic sweep")->delimiter(',')->capture_default_str();
  cmp_cmd->add_option("--m", compare_args.m, "Mic count for the T60 sweep")->capture_default_str();
  cmp_cmd->add_option("--t60", compare_args.t60, "T60 level for the mic sweep [s]")->capture_default_str();
  cmp_cmd->add_option("--t60-levels", compare_args.t60_levels, "T60 levels for the T60 sweep")
      ->delimiter(',')
      ->capture_default_str();
  cmp_cmd->add_option("--seed", compare_args.seed, "Mask seed")->capture_default_str();
  auto* plot_cmd = app.add_subcommand("plots", "Render SVG charts from a metrics CSV");
  plot_cmd->add_option("--metrics", plot_args.metrics, "metrics.csv from eval or compare")->required();
  plot_cmd->add_option("--out", plot_args.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgument;
  }

  try {
    if (sim_cmd->parsed()) run_simulate(sim, common);
    else if (gen_cmd->parsed()) run_gen(gen, common);
    else if (train_cmd->parsed()) run_train(train, common);
    else if (eval_cmd->parsed()) run_eval(eval_args, common);
    else if (cmp_cmd->parsed()) run_compare(compare_args, common);
    else if (plot_cmd->parsed()) run_plots(plot_args, common);
    return kExitOk;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace rtfnet
