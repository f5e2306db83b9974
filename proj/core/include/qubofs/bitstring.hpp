#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qubofs {

/// Fixed-length binary selection vector z in {0,1}^n. Bit i answers
/// "is feature i selected". Comparison is lexicographic on (z_0, z_1, ...),
/// which is the tie-break order used by the exact solver.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}
  BitString(std::initializer_list<int> bits);

  /// Parses "1101" or "0b1101"; character k maps to bit k.
  static BitString parse(std::string_view text);

  /// Bits taken from the low `n` bits of `mask` (bit i of mask -> z_i).
  static BitString from_mask(std::uint64_t mask, std::size_t n);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  int popcount() const;
  std::uint64_t to_mask() const;  // requires size() <= 64
  std::string to_string() const;

  const std::vector<std::uint8_t>& raw() const { return bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString& a, const BitString& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace qubofs
