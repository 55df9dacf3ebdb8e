#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "common.hpp"

namespace hpt {

// Binary range coder, 32-bit range with byte renormalisation.  Probabilities
// are given as p0/2^scale_bits for the 0-branch and must lie in (0, 2^scale).
// The encoder flushes the whole 32-bit low register, so the decoder consumes
// exactly the bytes that were written -- nothing implicit at the tail.
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<uint8_t>& out) : out_(out) {}

  void encode(int bit, uint32_t p0, uint32_t scale_bits) {
    uint32_t before = range_;
    uint32_t bound = uint32_t((uint64_t(range_) * p0) >> scale_bits);
    if (bound == 0) bound = 1;
    if (bound >= range_) bound = range_ - 1;
    if (bit == 0) {
      range_ = bound;
    } else {
      low_ += bound;
      range_ -= bound;
    }
    cost_bits_ += std::log2(double(before) / double(range_));
    while (range_ < kTop) {
      shift_low();
      range_ <<= 8;
    }
    ++decisions_;
  }

  void finish() {
    if (decisions_ == 0) return;  // nothing coded, nothing written
    for (int i = 0; i < 4; ++i) shift_low();
    if (have_cache_) out_.push_back(cache_);
    for (; pending_; --pending_) out_.push_back(0xFF);
  }

  uint64_t decisions() const { return decisions_; }
  // information actually coded, before byte quantisation and flush
  double cost_bits() const { return cost_bits_; }

 private:
  static constexpr uint32_t kTop = 1u << 24;

  void shift_low() {
    uint32_t carry = uint32_t(low_ >> 32);
    if (carry != 0 || uint32_t(low_) < 0xFF000000u) {
      if (have_cache_) out_.push_back(uint8_t(cache_ + carry));
      for (; pending_; --pending_) out_.push_back(uint8_t(0xFF + carry));
      cache_ = uint8_t(low_ >> 24);
      have_cache_ = true;
    } else {
      ++pending_;
    }
    low_ = (low_ << 8) & 0xFFFFFFFFull;
  }

  std::vector<uint8_t>& out_;
  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint64_t pending_ = 0;
  uint8_t cache_ = 0;
  bool have_cache_ = false;
  uint64_t decisions_ = 0;
  double cost_bits_ = 0.0;
};

class RangeDecoder {
 public:
  RangeDecoder(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  int decode(uint32_t p0, uint32_t scale_bits) {
    if (!primed_) {
      for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
      primed_ = true;
    }
    uint32_t bound = uint32_t((uint64_t(range_) * p0) >> scale_bits);
    if (bound == 0) bound = 1;
    if (bound >= range_) bound = range_ - 1;
    int bit;
    if (code_ < bound) {
      bit = 0;
      range_ = bound;
    } else {
      bit = 1;
      code_ -= bound;
      range_ -= bound;
    }
    while (range_ < kTop) {
      code_ = (code_ << 8) | next_byte();
      range_ <<= 8;
    }
    return bit;
  }

  size_t consumed() const { return pos_; }

 private:
  static constexpr uint32_t kTop = 1u << 24;

  uint8_t next_byte() {
    if (pos_ >= size_) fail(Err::Truncated, "coded payload ends early");
    return data_[pos_++];
  }

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
  uint32_t code_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  bool primed_ = false;
};

}  // namespace hpt
