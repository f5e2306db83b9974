#include "qubofs/bitstring.hpp"

#include <numeric>
#include <stdexcept>

namespace qubofs {

BitString::BitString(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) bits_.push_back(b ? 1 : 0);
}

BitString BitString::parse(std::string_view text) {
  if (text.starts_with("0b") || text.starts_with("0B")) text.remove_prefix(2);
  BitString out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '0' && c != '1')
      throw std::invalid_argument("bit-string literal must contain only 0/1");
    out.bits_[i] = static_cast<std::uint8_t>(c - '0');
  }
  return out;
}

BitString BitString::from_mask(std::uint64_t mask, std::size_t n) {
  BitString out(n);
  for (std::size_t i = 0; i < n; ++i) out.bits_[i] = (mask >> i) & 1u;
  return out;
}

int BitString::popcount() const {
  return std::accumulate(bits_.begin(), bits_.end(), 0);
}

std::uint64_t BitString::to_mask() const {
  if (size() > 64) throw std::length_error("bit-string too long for a 64-bit mask");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) mask |= (std::uint64_t{1} << i);
  return mask;
}

std::string BitString::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

}  // namespace qubofs
