#include "sechyp/basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace sechyp {

Basis::Basis(int n, int max_excitations) : n_(n), trunc_(max_excitations) {
  if (n < 1 || n > 31) throw std::invalid_argument("Basis: n must be in [1, 31]");
  if (trunc_ < 0 || trunc_ > n) throw std::invalid_argument("Basis: bad truncation");

  // Recursive enumeration emits codes directly in lexicographic order
  // (0 < 1 < e per qubit, qubit 0 leading).
  auto emit = [&](auto&& self, int q, int exc, std::uint64_t code) -> void {
    if (q == n_) {
      codes_.push_back(code);
      return;
    }
    const int shift = 2 * (n_ - 1 - q);
    self(self, q + 1, exc, code);                                   // |0>
    self(self, q + 1, exc, code | (std::uint64_t(1) << shift));     // |1>
    if (exc < trunc_)
      self(self, q + 1, exc + 1, code | (std::uint64_t(2) << shift));  // |e>
  };
  emit(emit, 0, 0, 0);

  masks_.reserve(codes_.size());
  for (auto c : codes_) {
    std::uint32_t m = 0;
    for (int i = 0; i < n_; ++i)
      if (qubit_state(c, i) == kExcited) m |= (1u << i);
    masks_.push_back(m);
  }
}

std::size_t Basis::index_of(std::uint64_t code) const {
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code)
    throw std::out_of_range("Basis::index_of: state not in truncated basis");
  return static_cast<std::size_t>(it - codes_.begin());
}

bool Basis::contains(std::uint64_t code) const {
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  return it != codes_.end() && *it == code;
}

std::uint64_t Basis::ground_code(std::uint32_t bits) const {
  std::uint64_t code = 0;
  for (int q = 0; q < n_; ++q)
    if (bits & (1u << q)) code |= std::uint64_t(1) << (2 * (n_ - 1 - q));
  return code;
}

int Basis::excitations(std::uint64_t code) const {
  int c = 0;
  for (int q = 0; q < n_; ++q)
    if (qubit_state(code, q) == kExcited) ++c;
  return c;
}

std::string Basis::label(std::size_t idx) const {
  static const char sym[3] = {'0', '1', 'e'};
  std::string s(n_, '?');
  for (int q = 0; q < n_; ++q) s[q] = sym[qubit_state(codes_[idx], q)];
  return s;
}

std::shared_ptr<const Basis> make_basis(int n, int max_excitations) {
  return std::make_shared<const Basis>(n, max_excitations);
}

}  // namespace sechyp
