#pragma once

#include <complex>
#include <span>

namespace mimo {

/// Unscaled forward DFT, out[l] = sum_t in[t] exp(-j 2 pi l t / N), for any length N.
///
/// Plans are cached per length; safe to call from several threads.
void forward_dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace mimo
