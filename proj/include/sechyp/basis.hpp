#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace sechyp {

/// Ordered basis of the truncated register space {|0>,|1>,|e>}^n with at most
/// `max_excitations` qubits in |e>. States are ordered lexicographically over
/// qubit-local states with 0 < 1 < e and qubit 0 as the leading symbol; a state
/// is packed into a 64-bit code with two bits per qubit, qubit 0 occupying the
/// most significant field, so numeric code order equals lexicographic order.
class Basis {
 public:
  static constexpr int kGround0 = 0, kGround1 = 1, kExcited = 2;

  Basis(int n, int max_excitations);

  int n() const { return n_; }
  int truncation() const { return trunc_; }
  std::size_t size() const { return codes_.size(); }

  std::uint64_t code(std::size_t idx) const { return codes_[idx]; }
  std::size_t index_of(std::uint64_t code) const;  // throws std::out_of_range
  bool contains(std::uint64_t code) const;

  int qubit_state(std::uint64_t code, int q) const {
    return static_cast<int>((code >> (2 * (n_ - 1 - q))) & 3u);
  }
  std::uint64_t with_qubit_state(std::uint64_t code, int q, int s) const {
    int shift = 2 * (n_ - 1 - q);
    return (code & ~(std::uint64_t(3) << shift)) | (std::uint64_t(s) << shift);
  }

  /// Code of a computational ground state; bit q of `bits` selects |1> for qubit q.
  std::uint64_t ground_code(std::uint32_t bits) const;
  int excitations(std::uint64_t code) const;

  /// Bit q set iff qubit q is excited; precomputed per basis state.
  std::uint32_t excited_mask(std::size_t idx) const { return masks_[idx]; }

  std::string label(std::size_t idx) const;  // e.g. "01e0", qubit 0 first

 private:
  int n_;
  int trunc_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::uint32_t> masks_;
};

std::shared_ptr<const Basis> make_basis(int n, int max_excitations);

}  // namespace sechyp
