// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "avs/common.hpp"

namespace avs {

/// One complex m-vector per frequency bin, contiguous per bin.
class BinVectors {
 public:
  BinVectors() = default;
  BinVectors(std::size_t bins, std::size_t m) : bins_(bins), m_(m), data_(bins * m) {}

  std::size_t bins() const { return bins_; }
  std::size_t size() const { return m_; }

  std::span<Complex> at(std::size_t k) { return {data_.data() + k * m_, m_}; }
  std::span<const Complex> at(std::size_t k) const { return {data_.data() + k * m_, m_}; }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

 private:
  std::size_t bins_ = 0;
  std::size_t m_ = 0;
  CVector data_;
};

/// One row-major m×m complex matrix per frequency bin.
class BinMatrices {
 public:
  BinMatrices() = default;
  BinMatrices(std::size_t bins, std::size_t m) : bins_(bins), m_(m), data_(bins * m * m) {}

  std::size_t bins() const { return bins_; }
  std::size_t size() const { return m_; }

  std::span<Complex> at(std::size_t k) { return {data_.data() + k * m_ * m_, m_ * m_}; }
  std::span<const Complex> at(std::size_t k) const { return {data_.data() + k * m_ * m_, m_ * m_}; }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  /// Principal submatrices on the listed rows/columns.
  BinMatrices select(std::span<const std::size_t> channels) const {
    BinMatrices out(bins_, channels.size());
    const std::size_t n = channels.size();
    for (std::size_t k = 0; k < bins_; ++k) {
      auto src = at(k);
      auto dst = out.at(k);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dst[i * n + j] = src[channels[i] * m_ + channels[j]];
    }
    return out;
  }

 private:
  std::size_t bins_ = 0;
  std::size_t m_ = 0;
  CVector data_;
};

}  // namespace avs
