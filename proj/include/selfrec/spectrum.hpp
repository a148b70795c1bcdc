#pragma once

#include "selfrec/common.hpp"

namespace selfrec {

// Centered 2D FFT magnitude of the channel-mean grayscale image.
// Input (C,H,W) in [0,1]; output (H,W), DC at (H/2, W/2).
torch::Tensor fft_magnitude_spectrum(const torch::Tensor& img);

// log1p-compressed spectrum rescaled to [0,1], for writing out as an image.
torch::Tensor fft_log_spectrum_image(const torch::Tensor& img);

// Fraction of non-DC spectral energy outside the centered disk of radius
// cutoff * min(H,W)/2. A constant image has no non-DC energy and maps to 0.
double high_frequency_ratio(const torch::Tensor& img, double cutoff = 0.5);

}  // namespace selfrec
