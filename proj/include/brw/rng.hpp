#ifndef BRW_RNG_HPP
#define BRW_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace brw {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). A stream is
/// keyed by (seed, stream id); draws are a pure function of the counter, so
/// parallel trials replay bit-identically by stream id regardless of
/// scheduling.
class Philox {
 public:
  Philox(uint64_t seed, uint64_t stream) {
    key_[0] = (uint32_t)seed;
    key_[1] = (uint32_t)(seed >> 32);
    ctr_hi_ = stream;
    ctr_lo_ = 0;
  }

  double uniform() {  // in (0,1]
    if (buf_pos_ == 4) refill();
    return ((double)buf_[buf_pos_++] + 1.0) * (1.0 / 4294967296.0);
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static void round(std::array<uint32_t, 4>& c, uint32_t k0, uint32_t k1) {
    uint64_t p0 = 0xD2511F53ull * c[0];
    uint64_t p1 = 0xCD9E8D57ull * c[2];
    uint32_t hi0 = (uint32_t)(p0 >> 32), lo0 = (uint32_t)p0;
    uint32_t hi1 = (uint32_t)(p1 >> 32), lo1 = (uint32_t)p1;
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
  }

  void refill() {
    std::array<uint32_t, 4> c = {(uint32_t)ctr_lo_, (uint32_t)(ctr_lo_ >> 32),
                                 (uint32_t)ctr_hi_, (uint32_t)(ctr_hi_ >> 32)};
    uint32_t k0 = key_[0], k1 = key_[1];
    for (int r = 0; r < 10; ++r) {
      round(c, k0, k1);
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_ = c;
    buf_pos_ = 0;
    ++ctr_lo_;
  }

  std::array<uint32_t, 2> key_;
  uint64_t ctr_hi_ = 0, ctr_lo_ = 0;
  std::array<uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace brw

#endif
