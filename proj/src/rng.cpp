#include "hte/rng.hpp"

#include <cmath>
#include <numbers>

#include "hte/errors.hpp"

namespace hte {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t mix_label(std::uint64_t seed, std::string_view label,
                        std::uint64_t index) {
  // FNV-1a over the label bytes, then splitmix finalization with the index.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (const char c : label) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = h + 0x9e3779b97f4a7c15ULL * (index + 1);
  return splitmix64(s);
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

bool Rng::bernoulli(double p) { return uniform() < p; }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgumentError("uniform_index: n must be positive");
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t draw = next_u64();
  while (draw >= limit) draw = next_u64();
  return draw % n;
}

IndexVector Rng::sample_without_replacement(Index n, Index k) {
  if (k < 0 || k > n) {
    throw InvalidArgumentError("sample_without_replacement: need 0 <= k <= n");
  }
  IndexVector pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  IndexVector out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(uniform_index(
        static_cast<std::uint64_t>(n - i)));
    out.push_back(pool[j]);
    std::swap(pool[j], pool[static_cast<std::size_t>(n - 1 - i)]);
  }
  return out;
}

SeedTree::SeedTree(std::uint64_t master_seed)
    : master_(master_seed), seed_(master_seed), path_() {
  std::uint64_t s = master_seed ^ 0x6a09e667f3bcc909ULL;
  seed_ = splitmix64(s);
}

SeedTree::SeedTree(std::uint64_t master, std::uint64_t seed, std::string path)
    : master_(master), seed_(seed), path_(std::move(path)) {}

SeedTree SeedTree::child(std::string_view label, std::uint64_t index) const {
  std::string path = path_;
  if (!path.empty()) path += '/';
  path.append(label);
  path += '/';
  path += std::to_string(index);
  return SeedTree(master_, mix_label(seed_, label, index), std::move(path));
}

Rng SeedTree::stream() const { return Rng(seed_); }

Rng derive_stream(const SeedTree& tree, std::string_view label,
                  std::uint64_t index) {
  return tree.child(label, index).stream();
}

}  // namespace hte
