#pragma once

#include <cstdint>
#include <vector>

namespace seeaction::nn::kernels {

// Geometry of a stride-1, "same"-padded 3D cross-correlation on one sample.
struct Conv3dShape {
  int c_in = 1, depth = 1, height = 1, width = 1;
  int c_out = 1, kd = 3, kh = 3, kw = 3;

  size_t input_size() const { return static_cast<size_t>(c_in) * depth * height * width; }
  size_t output_size() const { return static_cast<size_t>(c_out) * depth * height * width; }
  size_t kernel_size() const { return static_cast<size_t>(c_out) * c_in * kd * kh * kw; }
};

template <typename T>
void conv3d_forward(const Conv3dShape& s, const T* input, const T* kernel, const T* bias, T* output);

// Accumulates into grad_input.
template <typename T>
void conv3d_backward_input(const Conv3dShape& s, const T* grad_output, const T* kernel, T* grad_input);

// Accumulates into grad_kernel and grad_bias.
template <typename T>
void conv3d_backward_params(const Conv3dShape& s, const T* grad_output, const T* input, T* grad_kernel, T* grad_bias);

struct Pool3dShape {
  int channels = 1, depth = 1, height = 1, width = 1;

  int out_depth() const { return (depth + 1) / 2; }
  int out_height() const { return (height + 1) / 2; }
  int out_width() const { return (width + 1) / 2; }
  size_t output_size() const { return static_cast<size_t>(channels) * out_depth() * out_height() * out_width(); }
};

// 2x2x2 window, stride 2, ceil mode. `argmax` receives the flat input index of
// the first maximal element of each window.
template <typename T>
void maxpool3d_forward(const Pool3dShape& s, const T* input, T* output, std::vector<int32_t>& argmax);

// y = W x (+ b). W is [m, n].
template <typename T>
void matvec(int m, int n, const T* weight, const T* x, const T* bias, T* y);

}  // namespace seeaction::nn::kernels
