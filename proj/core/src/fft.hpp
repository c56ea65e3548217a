#pragma once

#include <complex>

namespace onn::detail {

// Out-of-place 2-D DFT of a row-major height x width grid. The forward
// transform is unscaled; the inverse is scaled by 1/(width*height), so a
// forward/inverse round trip is the identity. Plans are cached per size
// and safe to execute from multiple threads on distinct buffers.
void fft2(int width, int height, const std::complex<double>* in, std::complex<double>* out);
void ifft2(int width, int height, const std::complex<double>* in, std::complex<double>* out);

}  // namespace onn::detail
