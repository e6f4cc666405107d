// Uniform circle grids, boundary functions with cached Fourier coefficients,
// and the normalized Hilbert transform T1 (harmonic conjugate vanishing at
// tau = 1).
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "crx/poly.hpp"

namespace crx {

class CircleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// N samples (power of two) at theta_k = -pi + 2 pi k / N; theta = 0 (the
// point tau = 1) sits at index N/2.
struct CircleGrid {
  int N = 2048;

  explicit CircleGrid(int n = 2048) : N(n) {
    if (N < 64 || (N & (N - 1)) != 0)
      throw CircleError("CircleGrid: N must be a power of two >= 64");
  }

  double theta(int k) const { return -M_PI + 2.0 * M_PI * k / N; }
  int index_of_zero() const { return N / 2; }
  bool operator==(const CircleGrid& o) const { return N == o.N; }
};

// Sampled boundary function with cached Fourier coefficients c_n for
// -N/2 <= n < N/2: f(theta) = sum c_n e^{i n theta}.
class BoundaryFn {
 public:
  BoundaryFn() = default;

  BoundaryFn(CircleGrid grid, Eigen::VectorXcd values)
      : grid_(grid), values_(std::move(values)) {
    if (int(values_.size()) != grid_.N)
      throw CircleError("BoundaryFn: value count does not match grid");
    compute_coeffs();
  }

  static BoundaryFn from_sampler(CircleGrid grid,
                                 std::function<Complex(double)> f) {
    Eigen::VectorXcd v(grid.N);
    for (int k = 0; k < grid.N; ++k) v(k) = f(grid.theta(k));
    BoundaryFn b(grid, std::move(v));
    b.sampler_ = std::move(f);
    return b;
  }

  static BoundaryFn constant(CircleGrid grid, Complex c) {
    return BoundaryFn(grid, Eigen::VectorXcd::Constant(grid.N, c));
  }

  // Synthesize samples from Fourier coefficients indexed -N/2 <= n < N/2.
  static BoundaryFn from_coeffs(CircleGrid grid, const std::vector<Complex>& c) {
    int N = grid.N;
    if (int(c.size()) != N)
      throw CircleError("BoundaryFn: coefficient count does not match grid");
    std::vector<Complex> freq(N), time(N);
    for (int m = 0; m < N; ++m) {
      int n = m < N / 2 ? m : m - N;
      double sign = (n % 2 == 0) ? 1.0 : -1.0;  // e^{-i n pi} phase of the grid
      freq[m] = sign * c[m] * double(N);
    }
    Eigen::FFT<double> fft;
    fft.inv(time, freq);
    Eigen::VectorXcd v(N);
    for (int k = 0; k < N; ++k) v(k) = time[k];
    return BoundaryFn(grid, std::move(v));
  }

  const CircleGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Complex value(int k) const { return values_(k); }
  Complex value_at_zero() const { return values_(grid_.index_of_zero()); }

  // Fourier coefficient c_n, -N/2 <= n < N/2.
  Complex coeff(int n) const {
    int N = grid_.N;
    if (n < -N / 2 || n >= N / 2) return Complex(0);
    return coeffs_[(n + N) % N];
  }

  bool is_real(double tol = 1e-12) const {
    for (int k = 0; k < grid_.N; ++k)
      if (std::abs(values_(k).imag()) > tol) return false;
    return true;
  }

  double sup_norm() const {
    double m = 0;
    for (int k = 0; k < grid_.N; ++k) m = std::max(m, std::abs(values_(k)));
    return m;
  }

  // Energy fraction in the top quarter of the spectrum (|n| >= N/4): the
  // aliasing health check for nonlinear operations.
  double top_quarter_energy_fraction() const {
    int N = grid_.N;
    double total = 0, top = 0;
    for (int n = -N / 2; n < N / 2; ++n) {
      double e = std::norm(coeff(n));
      total += e;
      if (std::abs(n) >= N / 4) top += e;
    }
    return total == 0 ? 0.0 : top / total;
  }

  // Resample on another grid: through the original sampler when available,
  // otherwise by trigonometric interpolation (exact for band-limited data).
  BoundaryFn resample(CircleGrid g) const {
    if (sampler_) return from_sampler(g, sampler_);
    Eigen::VectorXcd v(g.N);
    int N = grid_.N;
    for (int k = 0; k < g.N; ++k) {
      double t = g.theta(k);
      Complex s(0);
      for (int n = -N / 2; n < N / 2; ++n)
        s += coeff(n) * std::polar(1.0, n * t);
      v(k) = s;
    }
    return BoundaryFn(g, std::move(v));
  }

  // Holomorphic-extension evaluation at tau = r e^{i t} from the
  // nonnegative-frequency coefficients (valid when the negative-frequency
  // content vanishes, i.e. the boundary value of a holomorphic function).
  Complex holomorphic_eval(double r, double t) const {
    Complex s(0);
    for (int n = 0; n < grid_.N / 2; ++n)
      s += coeff(n) * std::pow(r, n) * std::polar(1.0, n * t);
    return s;
  }

  // Radial derivative at tau = 1 of the harmonic extension
  // sum c_n r^{|n|} e^{i n theta}.
  Complex harmonic_radial_derivative_at_one() const {
    Complex s(0);
    int N = grid_.N;
    for (int n = -N / 2; n < N / 2; ++n) s += double(std::abs(n)) * coeff(n);
    return s;
  }

  friend BoundaryFn operator+(const BoundaryFn& a, const BoundaryFn& b) {
    if (!(a.grid_ == b.grid_)) throw CircleError("BoundaryFn: grid mismatch");
    return BoundaryFn(a.grid_, a.values_ + b.values_);
  }
  friend BoundaryFn operator-(const BoundaryFn& a, const BoundaryFn& b) {
    if (!(a.grid_ == b.grid_)) throw CircleError("BoundaryFn: grid mismatch");
    return BoundaryFn(a.grid_, a.values_ - b.values_);
  }
  friend BoundaryFn operator*(const BoundaryFn& a, Complex s) {
    return BoundaryFn(a.grid_, a.values_ * s);
  }

 private:
  void compute_coeffs() {
    int N = grid_.N;
    std::vector<Complex> in(N), out(N);
    for (int k = 0; k < N; ++k) in[k] = values_(k);
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    coeffs_.resize(N);
    // theta_k = -pi + 2 pi k / N shifts the DFT by (-1)^n
    for (int m = 0; m < N; ++m) {
      int n = m < N / 2 ? m : m - N;  // signed frequency
      double sign = (n % 2 == 0) ? 1.0 : -1.0;
      coeffs_[m] = sign * out[m] / double(N);
    }
  }

  CircleGrid grid_{};
  Eigen::VectorXcd values_;
  std::vector<Complex> coeffs_;
  std::function<Complex(double)> sampler_;
};

// Normalized Hilbert transform: the unique real T1(sigma) such that
// sigma + i T1(sigma) has no negative-frequency content and T1(sigma)
// vanishes at theta = 0 (tau = 1). Spectrally c_n -> -i sign(n) c_n, then
// subtract the value at tau = 1.
inline BoundaryFn hilbert_transform(const BoundaryFn& sigma) {
  if (!sigma.is_real(1e-10)) throw CircleError("hilbert_transform: input not real");
  const CircleGrid& g = sigma.grid();
  int N = g.N;
  std::vector<Complex> c(N, Complex(0));
  for (int n = -N / 2; n < N / 2; ++n) {
    if (n == 0) continue;
    double sgn = n > 0 ? 1.0 : -1.0;
    c[(n + N) % N] = Complex(0, -sgn) * sigma.coeff(n);
  }
  BoundaryFn raw = BoundaryFn::from_coeffs(g, c);
  Eigen::VectorXcd v(N);
  double at_one = raw.value_at_zero().real();
  for (int k = 0; k < N; ++k) v(k) = Complex(raw.value(k).real() - at_one, 0.0);
  return BoundaryFn(g, std::move(v));
}

}  // namespace crx
