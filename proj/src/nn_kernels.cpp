#include "seeaction/nn/kernels.hpp"

#include <algorithm>
#include <limits>

namespace seeaction::nn::kernels {
namespace {

// Valid output range [lo, hi) along one axis for kernel tap `k` with padding `pad`.
inline void tap_range(int k, int pad, int extent, int& lo, int& hi) {
  lo = std::max(0, pad - k);
  hi = std::min(extent, extent + pad - k);
}

}  // namespace

template <typename T>
void conv3d_forward(const Conv3dShape& s, const T* input, const T* kernel, const T* bias, T* output) {
  const int pd = s.kd / 2, ph = s.kh / 2, pw = s.kw / 2;
  const size_t plane = static_cast<size_t>(s.height) * s.width;
  const size_t volume = plane * s.depth;
  for (int co = 0; co < s.c_out; ++co) {
    T* out = output + co * volume;
    std::fill(out, out + volume, bias ? bias[co] : T(0));
    for (int ci = 0; ci < s.c_in; ++ci) {
      const T* in = input + ci * volume;
      const T* k = kernel + (static_cast<size_t>(co) * s.c_in + ci) * s.kd * s.kh * s.kw;
      for (int a = 0; a < s.kd; ++a) {
        int d0, d1;
        tap_range(a, pd, s.depth, d0, d1);
        for (int b = 0; b < s.kh; ++b) {
          int h0, h1;
          tap_range(b, ph, s.height, h0, h1);
          for (int c = 0; c < s.kw; ++c) {
            int w0, w1;
            tap_range(c, pw, s.width, w0, w1);
            const T wv = k[(a * s.kh + b) * s.kw + c];
            if (wv == T(0)) continue;
            const int shift = c - pw;
            for (int d = d0; d < d1; ++d) {
              for (int h = h0; h < h1; ++h) {
                T* orow = out + d * plane + static_cast<size_t>(h) * s.width;
                const T* irow = in + (d + a - pd) * plane + static_cast<size_t>(h + b - ph) * s.width + shift;
                for (int w = w0; w < w1; ++w) orow[w] += wv * irow[w];
              }
            }
          }
        }
      }
    }
  }
}

template <typename T>
void conv3d_backward_input(const Conv3dShape& s, const T* grad_output, const T* kernel, T* grad_input) {
  const int pd = s.kd / 2, ph = s.kh / 2, pw = s.kw / 2;
  const size_t plane = static_cast<size_t>(s.height) * s.width;
  const size_t volume = plane * s.depth;
  for (int ci = 0; ci < s.c_in; ++ci) {
    T* gin = grad_input + ci * volume;
    for (int co = 0; co < s.c_out; ++co) {
      const T* gout = grad_output + co * volume;
      const T* k = kernel + (static_cast<size_t>(co) * s.c_in + ci) * s.kd * s.kh * s.kw;
      for (int a = 0; a < s.kd; ++a) {
        int d0, d1;
        tap_range(a, pd, s.depth, d0, d1);
        for (int b = 0; b < s.kh; ++b) {
          int h0, h1;
          tap_range(b, ph, s.height, h0, h1);
          for (int c = 0; c < s.kw; ++c) {
            int w0, w1;
            tap_range(c, pw, s.width, w0, w1);
            const T wv = k[(a * s.kh + b) * s.kw + c];
            if (wv == T(0)) continue;
            const int shift = c - pw;
            for (int d = d0; d < d1; ++d) {
              for (int h = h0; h < h1; ++h) {
                const T* grow = gout + d * plane + static_cast<size_t>(h) * s.width;
                T* irow = gin + (d + a - pd) * plane + static_cast<size_t>(h + b - ph) * s.width + shift;
                for (int w = w0; w < w1; ++w) irow[w] += wv * grow[w];
              }
            }
          }
        }
      }
    }
  }
}

template <typename T>
void conv3d_backward_params(const Conv3dShape& s, const T* grad_output, const T* input, T* grad_kernel, T* grad_bias) {
  const int pd = s.kd / 2, ph = s.kh / 2, pw = s.kw / 2;
  const size_t plane = static_cast<size_t>(s.height) * s.width;
  const size_t volume = plane * s.depth;
  for (int co = 0; co < s.c_out; ++co) {
    const T* gout = grad_output + co * volume;
    if (grad_bias) {
      T acc = 0;
      for (size_t i = 0; i < volume; ++i) acc += gout[i];
      grad_bias[co] += acc;
    }
    for (int ci = 0; ci < s.c_in; ++ci) {
      const T* in = input + ci * volume;
      T* gk = grad_kernel + (static_cast<size_t>(co) * s.c_in + ci) * s.kd * s.kh * s.kw;
      for (int a = 0; a < s.kd; ++a) {
        int d0, d1;
        tap_range(a, pd, s.depth, d0, d1);
        for (int b = 0; b < s.kh; ++b) {
          int h0, h1;
          tap_range(b, ph, s.height, h0, h1);
          for (int c = 0; c < s.kw; ++c) {
            int w0, w1;
            tap_range(c, pw, s.width, w0, w1);
            const int shift = c - pw;
            T acc = 0;
            for (int d = d0; d < d1; ++d) {
              for (int h = h0; h < h1; ++h) {
                const T* grow = gout + d * plane + static_cast<size_t>(h) * s.width;
                const T* irow = in + (d + a - pd) * plane + static_cast<size_t>(h + b - ph) * s.width + shift;
                for (int w = w0; w < w1; ++w) acc += grow[w] * irow[w];
              }
            }
            gk[(a * s.kh + b) * s.kw + c] += acc;
          }
        }
      }
    }
  }
}

template <typename T>
void maxpool3d_forward(const Pool3dShape& s, const T* input, T* output, std::vector<int32_t>& argmax) {
  const int od = s.out_depth(), oh = s.out_height(), ow = s.out_width();
  argmax.resize(s.output_size());
  size_t o = 0;
  for (int c = 0; c < s.channels; ++c) {
    const size_t cbase = static_cast<size_t>(c) * s.depth * s.height * s.width;
    for (int z = 0; z < od; ++z) {
      for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x, ++o) {
          T best = -std::numeric_limits<T>::infinity();
          int32_t best_i = -1;
          for (int dz = 0; dz < 2; ++dz) {
            const int iz = 2 * z + dz;
            if (iz >= s.depth) continue;
            for (int dy = 0; dy < 2; ++dy) {
              const int iy = 2 * y + dy;
              if (iy >= s.height) continue;
              for (int dx = 0; dx < 2; ++dx) {
                const int ix = 2 * x + dx;
                if (ix >= s.width) continue;
                const size_t i = cbase + (static_cast<size_t>(iz) * s.height + iy) * s.width + ix;
                if (best_i < 0 || input[i] > best) {
                  best = input[i];
                  best_i = static_cast<int32_t>(i);
                }
              }
            }
          }
          output[o] = best;
          argmax[o] = best_i;
        }
      }
    }
  }
}

template <typename T>
void matvec(int m, int n, const T* weight, const T* x, const T* bias, T* y) {
  for (int i = 0; i < m; ++i) {
    const T* row = weight + static_cast<size_t>(i) * n;
    T acc = bias ? bias[i] : T(0);
    for (int j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

#define SEEACTION_INSTANTIATE(T)                                                                        \
  template void conv3d_forward<T>(const Conv3dShape&, const T*, const T*, const T*, T*);                \
  template void conv3d_backward_input<T>(const Conv3dShape&, const T*, const T*, T*);                   \
  template void conv3d_backward_params<T>(const Conv3dShape&, const T*, const T*, T*, T*);              \
  template void maxpool3d_forward<T>(const Pool3dShape&, const T*, T*, std::vector<int32_t>&);           \
  template void matvec<T>(int, int, const T*, const T*, const T*, T*);

SEEACTION_INSTANTIATE(float)
SEEACTION_INSTANTIATE(double)

#undef SEEACTION_INSTANTIATE

}  // namespace seeaction::nn::kernels
