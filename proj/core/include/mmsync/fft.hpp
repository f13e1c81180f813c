#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mmsync {

/// Forward DFT X[k] = sum_n x[n] exp(-j 2 pi k n / size) of `x` zero-padded
/// to `size` points. Thread-safe; plans are cached per size.
std::vector<std::complex<double>> fft_zero_padded(std::span<const std::complex<double>> x,
                                                  std::size_t size);

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace mmsync
