#include "vdn/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "vdn/error.hpp"
#include "vdn/waveform.hpp"

namespace vdn {

double rms(const Waveform& wave) noexcept {
  if (wave.empty()) return 0.0;
  double acc = 0.0;
  for (double s : wave.samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(wave.size()));
}

namespace dsp {

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::span<Complex> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw ContractViolation("fft_inplace: length must be a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // Twiddles computed directly per index; a running product drifts for
    // long transforms.
    std::vector<Complex> twiddle(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(len);
      twiddle[k] = Complex(std::cos(angle), std::sin(angle));
    }
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = data[start + k];
        const Complex v = data[start + k + half] * twiddle[k];
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : data) x *= scale;
  }
}

namespace {

std::vector<Complex> bluestein(std::span<const Complex> input, bool inverse) {
  const std::size_t n = input.size();
  const std::size_t m = next_power_of_two(2 * n - 1);
  const double sign = inverse ? 1.0 : -1.0;

  // chirp[k] = exp(sign * i*pi*k^2/n); k^2 is reduced mod 2n to keep the
  // angle small and exact.
  std::vector<Complex> chirp(n);
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % two_n;
    const double angle = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = Complex(std::cos(angle), std::sin(angle));
  }

  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = input[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = std::conj(chirp[k]);
    b[m - k] = std::conj(chirp[k]);
  }

  fft_inplace(a);
  fft_inplace(b);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_inplace(a, true);

  std::vector<Complex> out(n);
  const double scale = inverse ? 1.0 / static_cast<double>(n) : 1.0;
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k] * scale;
  return out;
}

}  // namespace

std::vector<Complex> dft(std::span<const Complex> input, bool inverse) {
  if (input.empty()) return {};
  if (is_power_of_two(input.size())) {
    std::vector<Complex> out(input.begin(), input.end());
    fft_inplace(out, inverse);
    return out;
  }
  return bluestein(input, inverse);
}

std::vector<Complex> real_dft(std::span<const double> input) {
  std::vector<Complex> buf(input.begin(), input.end());
  if (is_power_of_two(buf.size())) {
    fft_inplace(buf);
    return buf;
  }
  return dft(buf);
}

}  // namespace dsp
}  // namespace vdn
