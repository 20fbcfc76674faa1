#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vdn::dsp {

using Complex = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept;

// In-place iterative radix-2 FFT. data.size() must be a power of two.
// The inverse transform is scaled by 1/N.
void fft_inplace(std::span<Complex> data, bool inverse = false);

// DFT of any length: radix-2 when possible, Bluestein's chirp-z otherwise.
std::vector<Complex> dft(std::span<const Complex> input, bool inverse = false);

// Full complex spectrum of a real sequence.
std::vector<Complex> real_dft(std::span<const double> input);

}  // namespace vdn::dsp
