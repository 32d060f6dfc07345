#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rtfnet/cvnn/tensor.hpp"
#include "rtfnet/cvnn/unet.hpp"

namespace rtfnet::cvnn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Checkpoint file layout (little-endian):
///   "RTFCKPT1" | u32 version | u32 meta_len | meta JSON | u32 n_tensors |
///   per tensor: u32 name_len | name | u32 rank | u64 dims[rank] |
///               f32 (re, im) pairs
struct StoredTensor {
  Shape shape;
  std::vector<std::complex<float>> values;
};

struct Checkpoint {
  nlohmann::json meta;
  std::vector<std::pair<std::string, StoredTensor>> tensors;

  const StoredTensor* find(const std::string& name) const;
  template <typename T>
  void add(const std::string& name, const ComplexTensor<T>& tensor);
  // Copies a stored tensor into `dest`; throws DataError on a missing name or
  // a shape mismatch.
  template <typename T>
  void restore(const std::string& name, ComplexTensor<T>& dest) const;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

nlohmann::json to_json(const UNetSpec& spec);
UNetSpec unet_spec_from_json(const nlohmann::json& j);

// Model-only checkpoints: spec in meta["unet"], tensors "param/<name>" and
// "buffer/<name>".
template <typename T>
void add_model(Checkpoint& ckpt, UNet<T>& model, const std::string& prefix = "");
template <typename T>
void restore_model(const Checkpoint& ckpt, UNet<T>& model, const std::string& prefix = "");
template <typename T>
std::unique_ptr<UNet<T>> load_model(const std::filesystem::path& path);

}  // namespace rtfnet::cvnn
