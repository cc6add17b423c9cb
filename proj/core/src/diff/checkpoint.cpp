#include "mind/diff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace mind::diff {

namespace {

constexpr char kMagic[4] = {'M', 'I', 'N', 'D'};
constexpr std::uint64_t kMaxNameLength = 1 << 16;
constexpr std::uint64_t kMaxRank = 8;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class Int>
void put(std::ostream& os, Int v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class Int>
Int get(std::istream& is) {
  Int v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("checkpoint: truncated file");
  return v;
}

}  // namespace

void write_tensors(std::ostream& os, const TensorMap& tensors) {
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint64_t>(os, tensors.size());
  for (const auto& [name, t] : tensors) {
    std::uint64_t count = 1;
    for (auto d : t.dims) count *= d;
    require(count == t.data.size(), "checkpoint: data length does not match dims for " + name);
    put<std::uint64_t>(os, name.size());
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint64_t>(os, t.dims.size());
    for (auto d : t.dims) put<std::uint64_t>(os, d);
    os.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
  if (!os) throw IoError("checkpoint: write failed");
}

TensorMap read_tensors(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("checkpoint: bad magic");
  const auto version = get<std::uint32_t>(is);
  if (version != kCheckpointVersion) throw ParseError("checkpoint: unsupported version " + std::to_string(version));
  const auto n = get<std::uint64_t>(is);
  TensorMap out;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = get<std::uint64_t>(is);
    if (len > kMaxNameLength) throw ParseError("checkpoint: implausible name length");
    std::string name(len, '\0');
    if (!is.read(name.data(), static_cast<std::streamsize>(len))) throw ParseError("checkpoint: truncated file");
    const auto rank = get<std::uint64_t>(is);
    if (rank > kMaxRank) throw ParseError("checkpoint: implausible rank for " + name);
    StoredTensor t;
    std::uint64_t count = 1;
    for (std::uint64_t r = 0; r < rank; ++r) {
      t.dims.push_back(get<std::uint64_t>(is));
      count *= t.dims.back();
    }
    if (count > (std::uint64_t{1} << 32)) throw ParseError("checkpoint: implausible tensor size for " + name);
    t.data.resize(count);
    if (!is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(count * sizeof(float))))
      throw ParseError("checkpoint: truncated file");
    if (!out.emplace(std::move(name), std::move(t)).second) throw ParseError("checkpoint: duplicate tensor name");
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const TensorMap& tensors) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_tensors(os, tensors);
}

TensorMap load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_tensors(is);
}

void store_params(TensorMap& out, const std::vector<Parameter<float>*>& params) {
  for (const Parameter<float>* p : params) {
    StoredTensor t;
    if (p->value.rows() == 1)
      t.dims = {static_cast<std::uint64_t>(p->value.cols())};
    else
      t.dims = {static_cast<std::uint64_t>(p->value.rows()), static_cast<std::uint64_t>(p->value.cols())};
    t.data.assign(p->value.data(), p->value.data() + p->value.size());
    require(out.emplace(p->name, std::move(t)).second, "store_params: duplicate parameter name " + p->name);
  }
}

void restore_params(const TensorMap& in, const std::vector<Parameter<float>*>& params) {
  for (Parameter<float>* p : params) {
    auto it = in.find(p->name);
    if (it == in.end()) throw ParseError("checkpoint: missing parameter " + p->name);
    const StoredTensor& t = it->second;
    const bool ok = p->value.rows() == 1
                        ? (t.dims.size() == 1 && t.dims[0] == static_cast<std::uint64_t>(p->value.cols()))
                        : (t.dims.size() == 2 && t.dims[0] == static_cast<std::uint64_t>(p->value.rows()) &&
                           t.dims[1] == static_cast<std::uint64_t>(p->value.cols()));
    if (!ok) throw ParseError("checkpoint: shape mismatch for " + p->name);
    std::memcpy(p->value.data(), t.data.data(), t.data.size() * sizeof(float));
  }
}

void store_scalar(TensorMap& out, const std::string& name, double value) {
  out[name] = StoredTensor{{1}, {static_cast<float>(value)}};
}

double restore_scalar(const TensorMap& in, const std::string& name) {
  auto it = in.find(name);
  if (it == in.end() || it->second.data.size() != 1) throw ParseError("checkpoint: missing scalar " + name);
  return it->second.data[0];
}

}  // namespace mind::diff
