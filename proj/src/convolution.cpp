#include "polylat/convolution.hpp"

#include <fftw3.h>

#include <cfloat>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace polylat {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void check_lengths(std::span<const real> a, std::span<const real> b) {
  if (a.size() != b.size()) throw std::invalid_argument("convolution operands differ in length");
  if (a.empty()) throw std::invalid_argument("convolution of empty vectors");
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const { fftwl_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftwl_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

}  // namespace

std::vector<real> cyclic_convolution_direct(std::span<const real> a, std::span<const real> b) {
  check_lengths(a, b);
  const std::size_t L = a.size();
  std::vector<real> out(L);
  for (std::size_t i = 0; i < L; ++i) {
    CompensatedSum<real> acc;
    for (std::size_t k = 0; k < L; ++k) acc += a[(i + L - k) % L] * b[k];
    out[i] = acc.value();
  }
  return out;
}

struct CyclicConvolver::Fft {
  std::size_t m = 0;  // padded length
  fftwl_plan forward = nullptr;
  fftwl_plan inverse = nullptr;
  FftwBuffer<fftwl_complex> spectrum;  // transform of the padded kernel

  ~Fft() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftwl_destroy_plan(forward);
    if (inverse) fftwl_destroy_plan(inverse);
  }
};

CyclicConvolver::CyclicConvolver(std::span<const real> a, std::size_t direct_threshold)
    : length_(a.size()), kernel_(a.begin(), a.end()) {
  if (a.empty()) throw std::invalid_argument("convolution of empty vectors");
  for (real v : kernel_) {
    kernel_norm2_ += v * v;
    kernel_max_ = std::max(kernel_max_, std::fabs(v));
  }
  kernel_norm2_ = std::sqrt(kernel_norm2_);
  if (length_ < direct_threshold) return;

  fft_ = std::make_unique<Fft>();
  const std::size_t m = next_pow2(2 * length_ - 1);
  fft_->m = m;
  auto in = fftw_alloc<long double>(m);
  auto spec = fftw_alloc<fftwl_complex>(m / 2 + 1);
  {
    std::lock_guard lock(planner_mutex());
    fft_->forward = fftwl_plan_dft_r2c_1d(static_cast<int>(m), in.get(), spec.get(), FFTW_ESTIMATE);
    fft_->inverse = fftwl_plan_dft_c2r_1d(static_cast<int>(m), spec.get(), in.get(), FFTW_ESTIMATE);
  }
  if (!fft_->forward || !fft_->inverse) throw std::runtime_error("FFTW planning failed");
  for (std::size_t i = 0; i < m; ++i) in[i] = i < length_ ? kernel_[i] : 0;
  fftwl_execute_dft_r2c(fft_->forward, in.get(), spec.get());
  fft_->spectrum = std::move(spec);
}

CyclicConvolver::~CyclicConvolver() = default;

std::size_t CyclicConvolver::transform_length() const { return fft_ ? fft_->m : 0; }

std::vector<real> CyclicConvolver::apply(std::span<const real> b) const {
  if (b.size() != length_) throw std::invalid_argument("convolution operands differ in length");
  if (!fft_) return cyclic_convolution_direct(kernel_, b);
  const std::size_t m = fft_->m;
  const std::size_t half = m / 2 + 1;
  auto in = fftw_alloc<long double>(m);
  auto spec = fftw_alloc<fftwl_complex>(half);
  for (std::size_t i = 0; i < m; ++i) in[i] = i < length_ ? b[i] : 0;
  fftwl_execute_dft_r2c(fft_->forward, in.get(), spec.get());
  const fftwl_complex* k = fft_->spectrum.get();
  for (std::size_t i = 0; i < half; ++i) {
    const long double re = spec[i][0] * k[i][0] - spec[i][1] * k[i][1];
    const long double im = spec[i][0] * k[i][1] + spec[i][1] * k[i][0];
    spec[i][0] = re;
    spec[i][1] = im;
  }
  fftwl_execute_dft_c2r(fft_->inverse, spec.get(), in.get());
  const real scale = 1.0L / static_cast<real>(m);
  std::vector<real> out(length_);
  for (std::size_t i = 0; i < length_; ++i) {
    const real wrapped = i + length_ < m ? in[i + length_] : 0;
    out[i] = (in[i] + wrapped) * scale;
  }
  return out;
}

real CyclicConvolver::error_bound(std::span<const real> b) const {
  real b1 = 0;
  real b2 = 0;
  for (real v : b) {
    b1 += std::fabs(v);
    b2 += v * v;
  }
  b2 = std::sqrt(b2);
  const real u = LDBL_EPSILON;
  if (!fft_) return 4 * u * kernel_max_ * b1;
  real a1 = 0;
  for (real v : kernel_) a1 += std::fabs(v);
  // Forward transforms, pointwise product and inverse each perturb by
  // O(u log2 M) relative to the l2 norms involved; |F a|_inf <= |a|_1.
  const real log_m = std::log2(static_cast<real>(fft_->m));
  return 16 * u * log_m * (a1 * b2 + kernel_norm2_ * b1);
}

std::vector<real> cyclic_convolution_fft(std::span<const real> a, std::span<const real> b) {
  check_lengths(a, b);
  return CyclicConvolver(a, 0).apply(b);
}

std::vector<real> cyclic_convolution(std::span<const real> a, std::span<const real> b, std::size_t direct_threshold) {
  check_lengths(a, b);
  return CyclicConvolver(a, direct_threshold).apply(b);
}

}  // namespace polylat
