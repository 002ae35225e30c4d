#pragma once
// Real <-> half-complex FFT on a periodic d-dimensional cube of n^d points.
// Owns aligned buffers; transforms are unnormalized in both directions.

#include <complex>
#include <cstddef>
#include <span>

namespace swl {

class RealFft {
 public:
  RealFft(int dim, std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t spectral_size() const { return spectral_size_; }

  std::span<double> real() { return {real_, real_size_}; }
  std::span<std::complex<double>> spectrum() { return {spec_, spectral_size_}; }

  void forward();   // real() -> spectrum()
  void backward();  // spectrum() -> real(); clobbers spectrum()

  // Signed integer wavenumber of each axis for spectral index `idx`
  // (last axis stored from 0 to n/2).
  void wavenumbers(std::size_t idx, int out[3]) const;

 private:
  int dim_;
  std::size_t n_;
  std::size_t real_size_;
  std::size_t spectral_size_;
  double* real_ = nullptr;
  std::complex<double>* spec_ = nullptr;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

}  // namespace swl
