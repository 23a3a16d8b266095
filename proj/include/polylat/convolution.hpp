#pragma once

// Cyclic convolution out[i] = sum_k a[(i - k) mod L] b[k] for arbitrary L.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "polylat/numeric.hpp"

namespace polylat {

inline constexpr std::size_t kDirectConvolutionThreshold = 512;

/// O(L^2) with a compensated accumulator per output; the reference path.
std::vector<real> cyclic_convolution_direct(std::span<const real> a, std::span<const real> b);

/// Transform path: zero-padded linear convolution at the next power of two
/// >= 2L - 1 (FFTW, long double), folded back to length L.
std::vector<real> cyclic_convolution_fft(std::span<const real> a, std::span<const real> b);

/// Direct below `direct_threshold`, transform path otherwise.
std::vector<real> cyclic_convolution(std::span<const real> a, std::span<const real> b,
                                     std::size_t direct_threshold = kDirectConvolutionThreshold);

/// Repeated convolution against one fixed kernel `a`: plans and the spectrum
/// of `a` are computed once.
class CyclicConvolver {
 public:
  CyclicConvolver(std::span<const real> a, std::size_t direct_threshold = kDirectConvolutionThreshold);
  ~CyclicConvolver();
  CyclicConvolver(const CyclicConvolver&) = delete;
  CyclicConvolver& operator=(const CyclicConvolver&) = delete;

  std::size_t length() const { return length_; }
  bool uses_transform() const { return static_cast<bool>(fft_); }
  /// Padded transform length (0 on the direct path).
  std::size_t transform_length() const;

  std::vector<real> apply(std::span<const real> b) const;

  /// A bound on |computed - exact| for every output of apply(b).
  real error_bound(std::span<const real> b) const;

 private:
  struct Fft;
  std::size_t length_;
  std::vector<real> kernel_;
  real kernel_norm2_ = 0;
  real kernel_max_ = 0;
  std::unique_ptr<Fft> fft_;
};

}  // namespace polylat
