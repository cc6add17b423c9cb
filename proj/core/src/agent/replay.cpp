#include "mind/agent/replay.hpp"

#include <algorithm>

namespace mind::agent {

NodeMask::NodeMask(const Graph& g) : words_((g.num_nodes() + 63) / 64, 0), n_(g.num_nodes()) {
  for (NodeId v = 0; v < n_; ++v)
    if (g.is_active(v)) words_[v >> 6] |= std::uint64_t{1} << (v & 63);
}

Graph NodeMask::apply(const Graph& base) const {
  require(base.num_nodes() == n_, "NodeMask::apply: node count mismatch");
  std::vector<std::uint8_t> m(n_);
  for (NodeId v = 0; v < n_; ++v) m[v] = test(v) ? 1 : 0;
  return base.with_mask(m);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  require(capacity > 0, "ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  require(count <= items_.size(), "ReplayBuffer::sample: not enough transitions");
  // Floyd's algorithm: uniform subset without replacement.
  std::vector<std::size_t> out;
  out.reserve(count);
  const std::size_t n = items_.size();
  for (std::size_t j = n - count; j < n; ++j) {
    const std::size_t t = uniform_int<std::size_t>(rng, 0, j);
    if (std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(t);
    else
      out.push_back(j);
  }
  return out;
}

}  // namespace mind::agent
