// Acceptance gate. Prints one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run only criterion N
//
// Exit status is 0 when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "isomorphism.hpp"
#include "oracles/oracles.hpp"
#include "rtfnet/cli.hpp"
#include "rtfnet/cvnn/batchnorm.hpp"
#include "rtfnet/cvnn/conv2d.hpp"
#include "rtfnet/cvnn/cprelu.hpp"
#include "rtfnet/cvnn/loss.hpp"
#include "rtfnet/cvnn/resample.hpp"
#include "rtfnet/cvnn/trainer.hpp"
#include "rtfnet/cvnn/unet.hpp"
#include "rtfnet/dataset.hpp"
#include "rtfnet/errors.hpp"
#include "rtfnet/eval.hpp"
#include "rtfnet/kernel_baseline.hpp"
#include "rtfnet/modal_sim.hpp"
#include "test_support.hpp"

using namespace rtfnet;
using namespace rtfnet::cvnn;
namespace fs = std::filesystem;
using Cx = std::complex<double>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RoomSpec random_room(Rng& rng) {
  RoomSpec r = sample_room(rng);
  return r;
}

Vec3 random_interior(const RoomSpec& r, Rng& rng) {
  return {rng.uniform(0, r.lx), rng.uniform(0, r.ly), rng.uniform(0, r.lz)};
}

double rel(Cx a, Cx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---- AC1 -------------------------------------------------------------------
Outcome ac1() {
  Rng rng(0xac1);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    RoomSpec room = random_room(rng);
    room.source = random_interior(room, rng);
    const Vec3 rcv = random_interior(room, rng);
    const double f = rng.uniform(30, 300);
    const auto modes = enumerate_modes(room, kDefaultModalCutoffHz);
    const Cx got = rtf(room, rcv, 2 * std::numbers::pi * f, modes);
    const oracle::Box box{room.lx, room.ly, room.lz, room.t60, room.speed_of_sound, room.source};
    const Cx want = oracle::modal_sum(box, rcv, f, kDefaultModalCutoffHz);
    worst = std::max(worst, rel(got, want));
  }
  return {worst < 1e-12, fmt("1000 tuples, worst relative error %.3e (limit 1e-12)", worst)};
}

// ---- AC2 -------------------------------------------------------------------
Outcome ac2() {
  Rng rng(0xac2);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    RoomSpec a = random_room(rng);
    const Vec3 s = random_interior(a, rng), r = random_interior(a, rng);
    const double omega = 2 * std::numbers::pi * rng.uniform(30, 300);
    const auto modes = enumerate_modes(a, kDefaultModalCutoffHz);
    a.source = s;
    RoomSpec b = a;
    b.source = r;
    worst = std::max(worst, rel(rtf(a, r, omega, modes), rtf(b, s, omega, modes)));
  }
  return {worst < 1e-12, fmt("1000 swaps, worst relative deviation %.3e (limit 1e-12)", worst)};
}

// ---- AC3 -------------------------------------------------------------------
using T4 = ComplexTensor<double>;

T4 random_tensor(Shape s, Rng& rng) {
  T4 t(std::move(s));
  gradcheck::fill_random(t, rng);
  return t;
}

Outcome ac3() {
  constexpr double kStep = 1e-5, kTol = 1e-4;
  constexpr std::size_t kSamples = 200;
  Rng rng(0xac3);
  std::vector<std::pair<std::string, gradcheck::Result>> results;

  {  // convolution, stride 2
    Conv2dOptions o;
    o.in_channels = 3;
    o.out_channels = 4;
    o.stride_h = o.stride_w = 2;
    ComplexConv2d<double> conv(o);
    conv.initialize(rng);
    gradcheck::fill_random(conv.bias(), rng);
    T4 x = random_tensor({2, 6, 5, 3}, rng);
    T4 y = conv.forward(x);
    const auto r = gradcheck::random_like(y, rng);
    T4 dx = conv.backward(gradcheck::loss_grad(y, r));
    std::vector<gradcheck::Probe> p = {{"x", &x, {dx.values().begin(), dx.values().end()}},
                                       {"w", &conv.weight(), gradcheck::grad_of(conv.weight())},
                                       {"b", &conv.bias(), gradcheck::grad_of(conv.bias())}};
    results.push_back({"conv", gradcheck::check(p, [&] { return conv.forward(x); }, r, rng, kSamples, kStep)});
  }
  {  // CPReLU
    CPReLU<double> act(3);
    gradcheck::fill_random(act.alpha(), rng);
    T4 x = random_tensor({2, 4, 4, 3}, rng);
    for (auto& v : x.values()) {
      v = {v.real() + (v.real() >= 0 ? 0.01 : -0.01), v.imag() + (v.imag() >= 0 ? 0.01 : -0.01)};
    }
    T4 y = act.forward(x);
    const auto r = gradcheck::random_like(y, rng);
    T4 dx = act.backward(gradcheck::loss_grad(y, r));
    std::vector<gradcheck::Probe> p = {{"x", &x, {dx.values().begin(), dx.values().end()}},
                                       {"alpha", &act.alpha(), gradcheck::grad_of(act.alpha())}};
    results.push_back({"cprelu", gradcheck::check(p, [&] { return act.forward(x); }, r, rng, kSamples, kStep)});
  }
  {  // batch norm
    ComplexBatchNorm<double> bn(3);
    gradcheck::fill_random(bn.gamma_r(), rng);
    gradcheck::fill_random(bn.gamma_i(), rng);
    gradcheck::fill_random(bn.beta(), rng);
    T4 x = random_tensor({2, 4, 4, 3}, rng);
    for (auto& v : x.values()) v = {v.real() + 0.3 * v.imag(), v.imag()};
    T4 y = bn.forward(x, Phase::kTraining);
    const auto r = gradcheck::random_like(y, rng);
    T4 dx = bn.backward(gradcheck::loss_grad(y, r));
    std::vector<gradcheck::Probe> p = {{"x", &x, {dx.values().begin(), dx.values().end()}},
                                       {"gamma_r", &bn.gamma_r(), gradcheck::grad_of(bn.gamma_r())},
                                       {"gamma_i", &bn.gamma_i(), gradcheck::grad_of(bn.gamma_i())},
                                       {"beta", &bn.beta(), gradcheck::grad_of(bn.beta())}};
    results.push_back(
        {"batchnorm", gradcheck::check(p, [&] { return bn.forward(x, Phase::kTraining); }, r, rng, kSamples, kStep)});
  }
  {  // upsampling, concatenation and channel slicing
    T4 a = random_tensor({1, 3, 4, 2}, rng), b = random_tensor({1, 6, 8, 3}, rng);
    auto fwd = [&] { return leading_channels(concat_channels(upsample2x(a), b), 4); };
    T4 y = fwd();
    const auto r = gradcheck::random_like(y, rng);
    T4 ga, gb;
    split_channels(pad_channels(gradcheck::loss_grad(y, r), 5), 2, ga, gb);
    T4 da = upsample2x_backward(ga);
    std::vector<gradcheck::Probe> p = {{"a", &a, {da.values().begin(), da.values().end()}},
                                       {"b", &b, {gb.values().begin(), gb.values().end()}}};
    results.push_back({"resample/concat", gradcheck::check(p, fwd, r, rng, kSamples, kStep)});
  }
  {  // L1 complex loss
    T4 est = random_tensor({1, 4, 4, 4}, rng), tgt = random_tensor({1, 4, 4, 4}, rng);
    const auto lr = l1_complex_loss(est, tgt);
    gradcheck::Result res;
    for (std::size_t s = 0; s < kSamples; ++s) {
      const std::size_t e = rng.index(est.size());
      const bool im = rng.index(2);
      double* ptr = reinterpret_cast<double*>(est.data() + e) + (im ? 1 : 0);
      const double num = oracle::central_difference([&] { return l1_complex_loss(est, tgt).value; }, *ptr, kStep);
      const double ana = im ? lr.grad[e].imag() : lr.grad[e].real();
      ++res.checked;
      res.worst = std::max(res.worst, oracle::rel_error(num, ana));
    }
    results.push_back({"l1_loss", res});
  }
  {  // tiny U-Net: two encoder stages, three decoder stages
    UNet<double> net(UNetSpec::with_widths(2, {4, 6}));
    net.initialize(rng);
    for (auto& p : net.parameters()) {
      if (p.name.find("bias") != std::string::npos || p.name.find("beta") != std::string::npos) {
        for (auto& v : p.tensor->values()) v = {0.1 * rng.uniform(-1, 1), 0.1 * rng.uniform(-1, 1)};
      }
    }
    T4 x = random_tensor({2, 8, 8, 4}, rng);
    T4 y = net.forward(x, Phase::kTraining);
    const auto r = gradcheck::random_like(y, rng);
    net.zero_grad();
    T4 dx = net.backward(gradcheck::loss_grad(y, r));
    std::vector<gradcheck::Probe> p = {{"input", &x, {dx.values().begin(), dx.values().end()}}};
    for (auto& q : net.parameters()) p.push_back({q.name, q.tensor, gradcheck::grad_of(*q.tensor)});
    results.push_back(
        {"unet", gradcheck::check(p, [&] { return net.forward(x, Phase::kTraining); }, r, rng, kSamples, kStep)});
  }

  bool ok = true;
  std::string detail;
  for (const auto& [name, res] : results) {
    ok = ok && res.checked >= 100 && res.worst < kTol;
    detail += fmt("%s %zu@%.1e; ", name.c_str(), res.checked, res.worst);
    if (res.worst >= kTol) detail += "[" + res.where + "] ";
  }
  return {ok, detail + "(limit 1e-4, >=100 components each)"};
}

// ---- AC4 -------------------------------------------------------------------
Outcome ac4() {
  Rng rng(0xac4);
  double worst = 0;
  for (std::size_t kernel : {1u, 3u}) {
    for (std::size_t stride : {1u, 2u}) {
      Conv2dOptions o;
      o.in_channels = 3;
      o.out_channels = 4;
      o.kernel_h = o.kernel_w = kernel;
      o.stride_h = o.stride_w = stride;
      ComplexConv2d<double> conv(o);
      conv.initialize(rng);
      for (auto& b : conv.bias().values()) b = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const std::size_t n = 2, h = 7, w = 6;
      std::vector<Cx> x(n * h * w * 3), up(n * ((h + stride - 1) / stride) * ((w + stride - 1) / stride) * 4);
      for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      for (auto& v : up) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const auto c = iso::compare(conv, x, n, h, w, up);
      worst = std::max({worst, c.output, c.input_grad, c.weight_grad, c.bias_grad});
    }
  }
  return {worst < 1e-10, fmt("outputs and gradients, worst abs deviation %.3e (limit 1e-10)", worst)};
}

// ---- AC5 -------------------------------------------------------------------
Outcome ac5() {
  const auto start = std::chrono::steady_clock::now();
  GenConfig g;
  g.n_rooms = 8;
  g.k = 8;
  g.grid_w = g.grid_h = 16;
  g.seed = 5;
  Dataset ds = generate_dataset(g);
  std::vector<SampleRecord> train = ds.train;
  train.insert(train.end(), ds.validation.begin(), ds.validation.end());
  std::vector<SampleRecord> val = {train.front()};

  UNet<float> net(UNetSpec::standard(8));
  Rng init(derive_seed(5, 1));
  net.initialize(init);
  TrainConfig c;
  c.batch = 4;
  c.max_epochs = 2000;
  c.patience = 2000;
  c.seed = 5;
  Trainer<float> trainer(net, c, train, val);
  double first = 0, last = 0;
  std::size_t epochs = 0;
  trainer.fit([&](const EpochStats& s) {
    if (s.epoch == 1) first = s.train_loss;
    last = s.train_loss;
    epochs = s.epoch;
    return last >= 0.05 * first;
  });
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  const bool ok = train.size() == 8 && last < 0.05 * first && epochs <= 2000 && minutes < 15.0;
  return {ok, fmt("%zu records, loss %.4g -> %.4g (%.2f%%) after %zu epochs in %.1f min (limits 5%%, 2000 epochs, 15 min)",
                  train.size(), first, last, 100.0 * last / first, epochs, minutes)};
}

// ---- AC6 -------------------------------------------------------------------
double observed_residual(const RoomSpec& room, const FieldGrid& field, const MicMask& mask, std::size_t k,
                         double lambda, double* alpha_norm = nullptr) {
  KernelProblem p;
  p.lambda = lambda;
  p.wavenumber = 2 * std::numbers::pi * field.freqs[k] / room.speed_of_sound;
  for (const auto& [w, h] : mask.observed) {
    p.positions.push_back(grid_point(room, w, h));
    p.observations.push_back(field.at(w, h, k));
  }
  const auto fitted = fit(p);
  const auto est = interpolate(p, fitted.alpha, p.positions);
  double num = 0, den = 0, an = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    num += std::norm(est[i] - p.observations[i]);
    den += std::norm(p.observations[i]);
    an += std::norm(fitted.alpha[i]);
  }
  if (alpha_norm) *alpha_norm = std::sqrt(an) / std::sqrt(den);
  return std::sqrt(num / den);
}

Outcome ac6() {
  Rng rng(0xac6);
  const auto freqs = frequency_grid(40, 30, 300);
  // Exactness: every mic count of the experiment, the reference room plus random rooms.
  std::vector<double> worst_by_m(kDefaultMicCounts.size(), 0.0);
  std::vector<std::size_t> failed_by_m(kDefaultMicCounts.size(), 0);
  std::size_t fits = 0;
  double worst_bias_gap = 0, min_residual = 1, max_residual = 0;
  for (int t = 0; t < 5; ++t) {
    const RoomSpec room = t == 0 ? testsupport::reference_room() : random_room(rng);
    const FieldGrid field = synthesize_field(room, freqs);
    for (std::size_t j = 0; j < kDefaultMicCounts.size(); ++j) {
      const MicMask mask = sample_mask(rng, kDefaultMicCounts[j], room.grid_w, room.grid_h);
      for (std::size_t k = 0; k < freqs.size(); ++k, ++fits) {
        try {
          worst_by_m[j] = std::max(worst_by_m[j], observed_residual(room, field, mask, k, 1e-12));
        } catch (const NumericalError&) {
          ++failed_by_m[j];
        }
      }
    }
    // Ridge bias at the default lambda: y - K alpha = lambda alpha.
    const MicMask mask = sample_mask(rng, 55, room.grid_w, room.grid_h);
    for (std::size_t k = 0; k < freqs.size(); ++k) {
      double alpha_rel = 0;
      const double r = observed_residual(room, field, mask, k, kDefaultKernelLambda, &alpha_rel);
      worst_bias_gap = std::max(worst_bias_gap, std::abs(r - kDefaultKernelLambda * alpha_rel));
      min_residual = std::min(min_residual, r);
      max_residual = std::max(max_residual, r);
    }
  }
  bool exact = true;
  std::string detail = "lambda=1e-12 worst residual by m:";
  for (std::size_t j = 0; j < kDefaultMicCounts.size(); ++j) {
    exact = exact && failed_by_m[j] == 0 && worst_by_m[j] < 1e-6;
    detail += fmt(" m=%zu %.1e", kDefaultMicCounts[j], worst_by_m[j]);
    if (failed_by_m[j]) detail += fmt(" (%zu unsolvable)", failed_by_m[j]);
  }
  const bool bias = min_residual > 0 && max_residual <= 1.0 && worst_bias_gap < 1e-9;
  detail += fmt(" over %zu fits (limit 1e-6)%s; lambda=0.01, m=55: residual in [%.2e, %.2e], "
                "|residual - lambda|alpha|| <= %.1e%s",
                fits, exact ? "" : " FAILS", min_residual, max_residual, worst_bias_gap, bias ? "" : " FAILS");
  return {exact && bias, detail};
}

// ---- AC7 -------------------------------------------------------------------
Outcome ac7() {
  const auto start = std::chrono::steady_clock::now();
  const auto freqs = frequency_grid(40, 30, 300);
  const std::size_t rooms = 200;
  KernelReconstructor kernel;
  Rng rng(0xac7);
  std::vector<RoomSpec> geometry;
  for (std::size_t i = 0; i < rooms; ++i) geometry.push_back(random_room(rng));

  auto records_at = [&](double t60) {
    std::vector<SampleRecord> out(rooms);
    parallel_for(rooms, 1, [&](std::size_t i) {
      out[i].room = geometry[i];
      out[i].room.t60 = t60;
      out[i].field = synthesize_field(out[i].room, freqs);
      out[i].field.room_id = std::to_string(i);
      out[i].seed = derive_seed(0xac7, i);
    });
    return out;
  };
  auto compare = [&](const MetricReport& better, const MetricReport& worse, std::size_t& wins) {
    wins = 0;
    for (std::size_t i = 0; i < rooms; ++i) wins += better.per_room_nmse_complex[i] < worse.per_room_nmse_complex[i];
    return better.mean_nmse_complex() < worse.mean_nmse_complex();
  };

  const auto mid = records_at(1.0);
  const auto mics = sweep_mics(kernel, mid, {5, 55}, 7);
  std::size_t mic_wins = 0;
  const bool mic_agg = compare(mics[1], mics[0], mic_wins);

  std::vector<SampleRecord> both = records_at(0.4);
  const auto high = records_at(1.6);
  both.insert(both.end(), high.begin(), high.end());
  const auto t60 = sweep_t60(kernel, both, {0.4, 1.6}, 55, 7);
  std::size_t t60_wins = 0;
  const bool t60_agg = compare(t60[0], t60[1], t60_wins);

  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  const bool ok = mic_agg && t60_agg && mic_wins * 10 >= rooms * 9 && t60_wins * 10 >= rooms * 9 && minutes < 30;
  return {ok, fmt("m=5 %.2f dB -> m=55 %.2f dB (%zu/%zu rooms); T60 0.4 s %.2f dB -> 1.6 s %.2f dB at m=55 "
                  "(%zu/%zu rooms); %.1f min",
                  mics[0].mean_nmse_complex(), mics[1].mean_nmse_complex(), mic_wins, rooms,
                  t60[0].mean_nmse_complex(), t60[1].mean_nmse_complex(), t60_wins, rooms, minutes)};
}

// ---- AC8 -------------------------------------------------------------------
Outcome ac8() {
  Rng rng(0xac8);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    FieldGrid g(4 + rng.index(5), 4 + rng.index(5), {100.0});
    for (auto& v : g.data) v = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    FieldGrid e = g;
    for (auto& v : e.data) v += Cx{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const FieldGrid zero(g.width, g.height, g.freqs);
    failures += nmse_complex(g, g, 0) != kNmseFloorDb;
    failures += nmse_abs(g, g, 0) != kNmseFloorDb;
    failures += nmse_complex(zero, g, 0) != 0.0;
    failures += nmse_abs(zero, g, 0) != 0.0;
    double num_abs = 0, num_cx = 0;
    for (std::size_t j = 0; j < g.data.size(); ++j) {
      const double d = std::abs(e.data[j]) - std::abs(g.data[j]);
      num_abs += d * d;
      num_cx += std::norm(e.data[j] - g.data[j]);
    }
    failures += num_abs > num_cx;
    failures += nmse_abs(e, g, 0) > nmse_complex(e, g, 0);
  }
  return {failures == 0, fmt("1000 random fields, %zu identity violations", failures)};
}

// ---- AC9 -------------------------------------------------------------------
int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rtfnet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome ac9() {
  const auto dir = testsupport::temp_dir("acceptance_ac9");
  std::size_t compared = 0, differing = 0;
  int status = 0;
  for (const char* run : {"a", "b"}) {
    const fs::path ds = dir / run / "data", tr = dir / run / "train";
    status |= cli({"--threads", "2", "gen-dataset", "--n-rooms", "8", "--k", "4", "--grid", "16", "16", "--seed",
                   "17", "--out", ds.string()});
    status |= cli({"--threads", "2", "train", "--data", ds.string(), "--out", tr.string(), "--widths", "8,16",
                   "--batch", "2", "--max-epochs", "3", "--seed", "17", "--quiet"});
  }
  for (const char* sub : {"data", "train"}) {
    for (const auto& e : fs::directory_iterator(dir / "a" / sub)) {
      if (e.path().filename() == "run.json") continue;  // wall time differs
      ++compared;
      differing += slurp(e.path()) != slurp(dir / "b" / sub / e.path().filename());
    }
  }
  fs::remove_all(dir);
  return {status == 0 && compared >= 12 && differing == 0,
          fmt("%zu artifacts compared, %zu differ, exit status %d", compared, differing, status)};
}

// ---- AC10 ------------------------------------------------------------------
Outcome ac10() {
  constexpr std::size_t kFrozen = 31489856;  // tests/oracles/param_count.py
  UNet<float> net(UNetSpec::standard(40));
  Rng rng(0xac10);
  net.initialize(rng);
  ComplexTensor<float> x({1, 32, 32, 80});
  for (auto& v : x.values()) v = {static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1))};
  const auto y = net.forward(x, Phase::kInference);
  const std::size_t count = net.real_parameter_count();
  const bool ok = y.shape() == Shape{1, 32, 32, 40} && count == kFrozen && y.all_finite();
  return {ok, fmt("output %s, %zu real parameters (expected %zu)", shape_string(y.shape()).c_str(), count, kFrozen)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 modal oracle equivalence", ac1}, {"AC2 reciprocity", ac2},
      {"AC3 gradient correctness", ac3},    {"AC4 complex/real isomorphism", ac4},
      {"AC5 overfit smoke test", ac5},      {"AC6 kernel exactness and ridge bias", ac6},
      {"AC7 kernel trends", ac7},           {"AC8 metric identities", ac8},
      {"AC9 determinism", ac9},             {"AC10 shape contract", ac10}};
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    only = std::atoi(argv[2]);
    if (only < 1 || only > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
      return 2;
    }
  } else if (argc != 1) {
    std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str(), s);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
