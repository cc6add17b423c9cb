#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mind/diff/tape.hpp"

namespace mind::diff {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// One stored tensor. Rank is 2 for weight matrices, 1 for bias rows and
/// scalar metadata entries.
struct StoredTensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;
};

using TensorMap = std::map<std::string, StoredTensor>;

void write_tensors(std::ostream& os, const TensorMap& tensors);
TensorMap read_tensors(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const TensorMap& tensors);
TensorMap load_checkpoint(const std::filesystem::path& path);

/// Parameters are stored rank 2 (rows, cols), except 1 x c bias rows which are rank 1.
void store_params(TensorMap& out, const std::vector<Parameter<float>*>& params);
/// Copies each parameter from `in`, requiring the stored shape to match exactly.
void restore_params(const TensorMap& in, const std::vector<Parameter<float>*>& params);

void store_scalar(TensorMap& out, const std::string& name, double value);
double restore_scalar(const TensorMap& in, const std::string& name);

}  // namespace mind::diff
