#pragma once

#include <cstddef>
#include <vector>

#include "cdg/padded.hpp"

namespace cdg {

inline constexpr int kNumFields = 5;  // rho, rho u, rho v, rho w, rho E

/// Per-element block storage of the five conserved fields: field c of
/// element k occupies [offset(k,c), offset(k,c)+values_per_field) with
/// offset(k,c) = (k*5 + c) * block_length and block_length a multiple of 16.
/// Padding slots hold zero and field starts stay 16-aligned.
class SolutionStore {
 public:
  SolutionStore() = default;
  SolutionStore(int n_elements, int values_per_field, bool padded = true)
      : n_elements_(n_elements),
        n_values_(values_per_field),
        block_(padded ? pad16(values_per_field) : values_per_field),
        data_(static_cast<size_t>(n_elements) * kNumFields * block_, 0.0) {}

  int n_elements() const { return n_elements_; }
  int values_per_field() const { return n_values_; }
  int block_length() const { return block_; }

  size_t offset(int element, int field) const {
    return (static_cast<size_t>(element) * kNumFields + field) * block_;
  }
  double* field(int element, int f) { return data_.data() + offset(element, f); }
  const double* field(int element, int f) const {
    return data_.data() + offset(element, f);
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  /// True when every padding slot is zero.
  bool padding_is_zero() const {
    for (int e = 0; e < n_elements_; ++e)
      for (int c = 0; c < kNumFields; ++c) {
        const double* p = field(e, c);
        for (int i = n_values_; i < block_; ++i)
          if (p[i] != 0.0) return false;
      }
    return true;
  }

  /// Dense per-element copy (element-major, field-major, value index last).
  std::vector<double> unpack() const {
    std::vector<double> out(static_cast<size_t>(n_elements_) * kNumFields * n_values_);
    size_t idx = 0;
    for (int e = 0; e < n_elements_; ++e)
      for (int c = 0; c < kNumFields; ++c) {
        const double* p = field(e, c);
        for (int i = 0; i < n_values_; ++i) out[idx++] = p[i];
      }
    return out;
  }

  void pack(const std::vector<double>& dense) {
    size_t idx = 0;
    for (int e = 0; e < n_elements_; ++e)
      for (int c = 0; c < kNumFields; ++c) {
        double* p = field(e, c);
        for (int i = 0; i < n_values_; ++i) p[i] = dense[idx++];
      }
  }

 private:
  int n_elements_ = 0;
  int n_values_ = 0;
  int block_ = 0;
  std::vector<double> data_;
};

}  // namespace cdg
