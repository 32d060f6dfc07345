#include "rtfnet/cvnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtfnet/cvnn/loss.hpp"
#include "rtfnet/errors.hpp"

namespace rtfnet::cvnn {

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ArgumentError("lr must be non-negative");
  if (batch == 0) throw ArgumentError("batch must be positive");
  if (max_epochs == 0) throw ArgumentError("max_epochs must be positive");
  if (patience == 0) throw ArgumentError("patience must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ArgumentError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ArgumentError("Adam eps must be positive");
  if (resample_masks && mic_choices.empty()) throw ArgumentError("resample_masks needs mic_choices");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"lr", c.lr},         {"batch", c.batch},
          {"max_epochs", c.max_epochs}, {"patience", c.patience},
          {"beta1", c.beta1},   {"beta2", c.beta2},
          {"eps", c.eps},       {"seed", c.seed},
          {"shuffle", c.shuffle}, {"resample_masks", c.resample_masks},
          {"mic_choices", c.mic_choices}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.lr = j.at("lr").get<double>();
    c.batch = j.at("batch").get<std::size_t>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.eps = j.at("eps").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.shuffle = j.at("shuffle").get<bool>();
    c.resample_masks = j.at("resample_masks").get<bool>();
    c.mic_choices = j.at("mic_choices").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad training config: ") + e.what());
  }
  return c;
}

template <typename T>
Trainer<T>::Trainer(UNet<T>& model, TrainConfig config, std::vector<SampleRecord> train,
                    std::vector<SampleRecord> validation)
    : model_(model),
      config_(std::move(config)),
      train_(std::move(train)),
      validation_(std::move(validation)),
      adam_(config_.adam()),
      rng_(derive_seed(config_.seed, 0x7472616e)) {
  config_.validate();
  if (train_.empty()) throw ArgumentError("training split is empty");
  if (validation_.empty()) throw ArgumentError("validation split is empty");
  const auto& spec = model_.spec();
  for (const auto* split : {&train_, &validation_}) {
    for (const auto& r : *split) {
      const std::size_t k = r.field.num_freqs();
      if (2 * k != spec.in_channels || k != spec.out_channels) {
        throw DataError("record " + r.field.room_id + " has K=" + std::to_string(k) +
                        " but the network expects K=" + std::to_string(spec.out_channels));
      }
      if (r.field.width % spec.spatial_multiple() || r.field.height % spec.spatial_multiple()) {
        throw DataError("grid " + std::to_string(r.field.width) + "x" + std::to_string(r.field.height) +
                        " is not divisible by " + std::to_string(spec.spatial_multiple()));
      }
    }
  }
  auto build_all = [this](const std::vector<SampleRecord>& recs, std::vector<ComplexTensor<T>>& in,
                          std::vector<ComplexTensor<T>>& tg) {
    in.resize(recs.size());
    tg.resize(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) build_tensors(recs[i], in[i], tg[i]);
  };
  if (!config_.resample_masks) build_all(train_, train_inputs_, train_targets_);
  build_all(validation_, val_inputs_, val_targets_);
}

template <typename T>
void Trainer<T>::build_tensors(const SampleRecord& record, ComplexTensor<T>& input, ComplexTensor<T>& target) {
  input = build_input<T>(apply_mask(record.field, record.mask), record.mask);
  target = field_tensor<T>(record.field);
}

namespace {

template <typename T>
ComplexTensor<T> stack(const std::vector<const ComplexTensor<T>*>& items) {
  const Shape& s = items.front()->shape();
  ComplexTensor<T> out({items.size(), s[0], s[1], s[2]});
  std::size_t at = 0;
  for (const auto* t : items) {
    std::copy(t->values().begin(), t->values().end(), out.values().begin() + static_cast<std::ptrdiff_t>(at));
    at += t->size();
  }
  return out;
}

// Contiguous batches; a trailing batch of one sample is folded into the
// previous batch so batch statistics always see at least two samples.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, std::size_t batch) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < n; b += batch) out.emplace_back(b, std::min(n, b + batch));
  if (out.size() > 1 && out.back().second - out.back().first == 1) {
    out[out.size() - 2].second = n;
    out.pop_back();
  }
  return out;
}

}  // namespace

template <typename T>
double Trainer<T>::validation_loss() {
  double total = 0.0;
  for (const auto& [b0, b1] : batch_ranges(validation_.size(), config_.batch)) {
    std::vector<const ComplexTensor<T>*> xs, ts;
    for (std::size_t i = b0; i < b1; ++i) {
      xs.push_back(&val_inputs_[i]);
      ts.push_back(&val_targets_[i]);
    }
    const auto y = model_.forward(stack(xs), Phase::kInference);
    total += l1_complex_loss(y, stack(ts)).value;
  }
  return total / static_cast<double>(validation_.size());
}

template <typename T>
EpochStats Trainer<T>::run_epoch() {
  if (finished()) throw ArgumentError("training already finished (" + history_.stop_reason + ")");
  std::vector<std::size_t> order(train_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config_.shuffle) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng_.index(i)]);
  }
  const auto params = model_.parameters();
  double total = 0.0;
  for (const auto& [b0, b1] : batch_ranges(order.size(), config_.batch)) {
    std::vector<ComplexTensor<T>> fresh_in, fresh_tg;
    std::vector<const ComplexTensor<T>*> xs, ts;
    if (config_.resample_masks) {
      fresh_in.resize(b1 - b0);
      fresh_tg.resize(b1 - b0);
    }
    for (std::size_t i = b0; i < b1; ++i) {
      const std::size_t r = order[i];
      if (config_.resample_masks) {
        SampleRecord rec = train_[r];
        const std::size_t m = config_.mic_choices[rng_.index(config_.mic_choices.size())];
        rec.mask = sample_mask(rng_, m, rec.field.width, rec.field.height);
        build_tensors(rec, fresh_in[i - b0], fresh_tg[i - b0]);
        xs.push_back(&fresh_in[i - b0]);
        ts.push_back(&fresh_tg[i - b0]);
      } else {
        xs.push_back(&train_inputs_[r]);
        ts.push_back(&train_targets_[r]);
      }
    }
    model_.zero_grad();
    const auto y = model_.forward(stack(xs), Phase::kTraining);
    const auto loss = l1_complex_loss(y, stack(ts));
    model_.backward(loss.grad);
    adam_.step(params);
    total += loss.value;
  }

  EpochStats stats;
  stats.epoch = history_.epochs.size() + 1;
  stats.train_loss = total / static_cast<double>(train_.size());
  stats.val_loss = validation_loss();
  if (!std::isfinite(stats.train_loss) || !std::isfinite(stats.val_loss)) {
    throw NumericalError("non-finite loss at epoch " + std::to_string(stats.epoch));
  }
  history_.epochs.push_back(stats);
  if (stats.val_loss < history_.best_val) {
    history_.best_val = stats.val_loss;
    history_.best_epoch = stats.epoch;
    history_.bad_epochs = 0;
    snapshot_best();
  } else {
    ++history_.bad_epochs;
  }
  if (history_.bad_epochs >= config_.patience) {
    stop("patience");
  } else if (stats.epoch >= config_.max_epochs) {
    stop("max_epochs");
  }
  return stats;
}

template <typename T>
const TrainHistory& Trainer<T>::fit(const EpochCallback& callback) {
  while (!finished()) {
    const EpochStats s = run_epoch();
    if (!finished() && callback && !callback(s)) stop("callback");
  }
  return history_;
}

template <typename T>
void Trainer<T>::snapshot_best() {
  best_.clear();
  for (auto& p : model_.parameters()) best_.emplace_back(p.tensor->shape(), std::vector(p.tensor->values().begin(), p.tensor->values().end()));
  for (auto& b : model_.buffers()) best_.emplace_back(b.tensor->shape(), std::vector(b.tensor->values().begin(), b.tensor->values().end()));
}

template <typename T>
void Trainer<T>::load_best() {
  if (best_.empty()) return;
  std::size_t i = 0;
  for (auto& p : model_.parameters()) {
    std::copy(best_[i].values().begin(), best_[i].values().end(), p.tensor->values().begin());
    ++i;
  }
  for (auto& b : model_.buffers()) {
    std::copy(best_[i].values().begin(), best_[i].values().end(), b.tensor->values().begin());
    ++i;
  }
}

template <typename T>
void Trainer<T>::stop(const std::string& reason) {
  history_.stop_reason = reason;
  load_best();
}

template <typename T>
Checkpoint Trainer<T>::state() const {
  Checkpoint ckpt;
  auto& model = const_cast<UNet<T>&>(model_);
  add_model(ckpt, model);
  auto& adam = const_cast<Adam<T>&>(adam_);
  for (const auto& [name, m] : adam.first_moments()) ckpt.add("adam.m/" + name, m);
  for (const auto& [name, v] : adam.second_moments()) ckpt.add("adam.v/" + name, v);
  if (!best_.empty()) {
    std::size_t i = 0;
    for (auto& p : model.parameters()) ckpt.add("best/param/" + p.name, best_[i++]);
    for (auto& b : model.buffers()) ckpt.add("best/buffer/" + b.name, best_[i++]);
  }
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& e : history_.epochs) hist.push_back({e.epoch, e.train_loss, e.val_loss});
  ckpt.meta["train_config"] = to_json(config_);
  ckpt.meta["adam_steps"] = adam_.steps();
  ckpt.meta["rng"] = rng_.state();
  ckpt.meta["history"] = hist;
  ckpt.meta["best_epoch"] = history_.best_epoch;
  ckpt.meta["best_val"] = std::isfinite(history_.best_val) ? nlohmann::json(history_.best_val) : nlohmann::json(nullptr);
  ckpt.meta["bad_epochs"] = history_.bad_epochs;
  ckpt.meta["stop_reason"] = history_.stop_reason;
  return ckpt;
}

template <typename T>
void Trainer<T>::restore(const Checkpoint& ckpt) {
  try {
    if (ckpt.meta.at("unet") != to_json(model_.spec())) {
      throw DataError("checkpoint network spec differs from the model");
    }
    restore_model(ckpt, model_);
    adam_ = Adam<T>(config_.adam());
    for (auto& p : model_.parameters()) {
      if (!ckpt.find("adam.m/" + p.name)) continue;
      ComplexTensor<T> m(p.tensor->shape()), v(p.tensor->shape());
      ckpt.restore("adam.m/" + p.name, m);
      ckpt.restore("adam.v/" + p.name, v);
      adam_.first_moments().emplace(p.name, std::move(m));
      adam_.second_moments().emplace(p.name, std::move(v));
    }
    adam_.set_steps(ckpt.meta.at("adam_steps").get<std::uint64_t>());
    rng_.set_state(ckpt.meta.at("rng").get<std::string>());
    history_ = {};
    for (const auto& e : ckpt.meta.at("history")) {
      history_.epochs.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>(), e.at(2).get<double>()});
    }
    history_.best_epoch = ckpt.meta.at("best_epoch").get<std::size_t>();
    const auto& bv = ckpt.meta.at("best_val");
    history_.best_val = bv.is_null() ? std::numeric_limits<double>::infinity() : bv.get<double>();
    history_.bad_epochs = ckpt.meta.at("bad_epochs").get<std::size_t>();
    history_.stop_reason = ckpt.meta.at("stop_reason").get<std::string>();
    best_.clear();
    if (ckpt.find("best/param/" + model_.parameters().front().name)) {
      for (auto& p : model_.parameters()) {
        best_.emplace_back(p.tensor->shape());
        ckpt.restore("best/param/" + p.name, best_.back());
      }
      for (auto& b : model_.buffers()) {
        best_.emplace_back(b.tensor->shape());
        ckpt.restore("best/buffer/" + b.name, best_.back());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad training state: ") + e.what());
  }
}

template class Trainer<float>;
template class Trainer<double>;

}  // namespace rtfnet::cvnn
