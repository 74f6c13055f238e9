#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace varicart {

// Configuration problems: bad flags, missing paths, invalid parameter values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates a format or contract (unknown label, sparse log, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A short label code such as "ES-AR" or "not-ES-CU".
class VarietyLabel {
 public:
  VarietyLabel() = default;
  explicit VarietyLabel(std::string code) : code_(std::move(code)) {}

  const std::string& code() const { return code_; }
  bool empty() const { return code_.empty(); }

  friend bool operator==(const VarietyLabel&, const VarietyLabel&) = default;
  friend auto operator<=>(const VarietyLabel&, const VarietyLabel&) = default;

 private:
  std::string code_;
};

// The two variety codes plus the common code a dataset declares.
struct LabelSet {
  VarietyLabel variety_a;
  VarietyLabel variety_b;
  VarietyLabel common;

  bool is_variety(const VarietyLabel& l) const { return l == variety_a || l == variety_b; }
  bool contains(const VarietyLabel& l) const { return is_variety(l) || l == common; }

  static LabelSet dsl_tl() { return {VarietyLabel("ES-AR"), VarietyLabel("ES-ES"), VarietyLabel("ES")}; }
  static LabelSet cuban() { return {VarietyLabel("ES-CU"), VarietyLabel("not-ES-CU"), VarietyLabel("ES")}; }
};

// SplitMix64 (Steele, Lea & Flood). The state advances by the golden-ratio
// increment and each output is the finalizer applied to the new state, so
// any implementation with 64-bit wrapping arithmetic reproduces the stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by rejection of the biased tail.
  std::uint64_t next_below(std::uint64_t bound);

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xCBF29CE484222325ULL);

// Hex rendering of a 64-bit value, 16 lowercase digits.
std::string hex64(std::uint64_t v);

// Shortest text that parses back to the same double.
std::string format_double(double v);

// Fixed two-decimal rendering used in reports.
std::string format_fixed2(double v);

}  // namespace varicart
