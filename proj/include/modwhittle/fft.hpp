#pragma once

#include <span>
#include <vector>

#include "modwhittle/core.hpp"

namespace modwhittle::fft {

/// Unnormalised forward transform X_k = sum_t x_t exp(-2 pi i k t / n).
std::vector<cplx> forward(std::span<const cplx> x);
/// Unnormalised backward transform x_t = sum_k X_k exp(+2 pi i k t / n).
std::vector<cplx> backward(std::span<const cplx> x);

void forward_inplace(std::vector<cplx>& x);
void backward_inplace(std::vector<cplx>& x);

/// Returns sum_t conj(x_t) x_{t+tau} for tau = 0..n-1 via zero padding.
std::vector<cplx> autocorrelation(std::span<const cplx> x);

}  // namespace modwhittle::fft
