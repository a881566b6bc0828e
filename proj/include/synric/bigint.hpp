#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synric/common.hpp"

namespace synric {

/// Arbitrary-precision unsigned integer, base 10^9 limbs. Supports exactly
/// what the factorial bounds need: small-integer multiplication, comparison
/// and decimal formatting.
class BigUint {
 public:
  BigUint() : limbs_{0} {}
  explicit BigUint(std::uint64_t v) {
    do {
      limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
      v /= kBase;
    } while (v > 0);
  }

  BigUint& mul(std::uint64_t m) {
    std::uint64_t carry = 0;
    for (auto& limb : limbs_) {
      const std::uint64_t cur = static_cast<std::uint64_t>(limb) * m + carry;
      limb = static_cast<std::uint32_t>(cur % kBase);
      carry = cur / kBase;
    }
    while (carry > 0) {
      limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
      carry /= kBase;
    }
    return *this;
  }

  bool operator==(const BigUint& o) const { return limbs_ == o.limbs_; }
  bool operator<=(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size()) return limbs_.size() < o.limbs_.size();
    for (size_t i = limbs_.size(); i-- > 0;)
      if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i];
    return true;
  }

  std::string str() const {
    std::string out = std::to_string(limbs_.back());
    char buf[16];
    for (size_t i = limbs_.size() - 1; i-- > 0;) {
      std::snprintf(buf, sizeof(buf), "%09u", limbs_[i]);
      out += buf;
    }
    return out;
  }

  size_t digits() const { return str().size(); }

 private:
  static constexpr std::uint64_t kBase = 1000000000ull;
  std::vector<std::uint32_t> limbs_;  // little-endian
};

/// Exact n! as a big integer. Counts above the cap would take minutes and
/// gigabytes to materialize; callers asking for them get a loud error instead
/// of a silently wrong double.
inline BigUint factorial(std::int64_t n, std::int64_t cap = 100000) {
  if (n < 0) throw Error("factorial: negative argument");
  if (n > cap)
    throw Error("factorial: argument " + std::to_string(n) +
                " exceeds the materialization cap " + std::to_string(cap));
  BigUint f(1);
  for (std::int64_t k = 2; k <= n; ++k) f.mul(static_cast<std::uint64_t>(k));
  return f;
}

}  // namespace synric
