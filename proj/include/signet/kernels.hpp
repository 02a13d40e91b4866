#pragma once

#include <cmath>
#include <cstdint>

#include "signet/tensor.hpp"

// Forward/backward compute kernels. Each forward kernel exists twice: a plain
// serial reference under kernels::serial and an OpenMP row-parallel version
// under kernels::par. Both compute every output element with identical
// arithmetic order, so results are bitwise equal and runs are reproducible
// regardless of thread count. The unprefixed entry points dispatch on problem
// size. tools/signet-bench times the two against each other.

namespace signet::kernels {

enum class Gelu { exact, fast };

namespace detail {

template <typename T>
inline T dot_rowcol(const T* a_row, const T* b, int64_t k, int64_t n, int64_t j) {
    T acc = T(0);
    for (int64_t p = 0; p < k; ++p) acc += a_row[p] * b[p * n + j];
    return acc;
}

/// out[i,:] for C = op(A)·op(B); A is m×k after transposition, B is k×n.
template <typename T>
inline void matmul_row(const T* a, const T* b, T* out, int64_t i, int64_t m, int64_t k,
                       int64_t n, bool trans_a, bool trans_b) {
    (void)m;
    for (int64_t j = 0; j < n; ++j) {
        T acc = T(0);
        for (int64_t p = 0; p < k; ++p) {
            const T av = trans_a ? a[p * m + i] : a[i * k + p];
            const T bv = trans_b ? b[j * k + p] : b[p * n + j];
            acc += av * bv;
        }
        out[i * n + j] = acc;
    }
}

template <typename T>
inline void softmax_slice(const T* x, T* y, int64_t len, int64_t stride) {
    T mx = x[0];
    for (int64_t j = 1; j < len; ++j) mx = std::max(mx, x[j * stride]);
    T sum = T(0);
    for (int64_t j = 0; j < len; ++j) {
        const T e = std::exp(x[j * stride] - mx);
        y[j * stride] = e;
        sum += e;
    }
    const T inv = T(1) / sum;
    for (int64_t j = 0; j < len; ++j) y[j * stride] *= inv;
}

template <typename T>
inline void layer_norm_row(const T* x, const T* gain, const T* bias, T* y, int64_t n, T eps) {
    T mean = T(0);
    for (int64_t j = 0; j < n; ++j) mean += x[j];
    mean /= T(n);
    T var = T(0);
    for (int64_t j = 0; j < n; ++j) {
        const T d = x[j] - mean;
        var += d * d;
    }
    var /= T(n);
    const T inv_std = T(1) / std::sqrt(var + eps);
    for (int64_t j = 0; j < n; ++j) {
        y[j] = (x[j] - mean) * inv_std * gain[j] + bias[j];
    }
}

template <typename T>
inline T gelu_scalar(T x, Gelu variant) {
    if (variant == Gelu::exact) {
        // x * Phi(x)
        return x * T(0.5) * (T(1) + std::erf(x * T(M_SQRT1_2)));
    }
    const T c = T(0.7978845608028654);  // sqrt(2/pi)
    const T u = c * (x + T(0.044715) * x * x * x);
    return T(0.5) * x * (T(1) + std::tanh(u));
}

template <typename T>
inline T gelu_grad_scalar(T x, Gelu variant) {
    if (variant == Gelu::exact) {
        const T phi = std::exp(-T(0.5) * x * x) * T(0.3989422804014327);  // pdf
        const T Phi = T(0.5) * (T(1) + std::erf(x * T(M_SQRT1_2)));
        return Phi + x * phi;
    }
    const T c = T(0.7978845608028654);
    const T a = T(0.044715);
    const T u = c * (x + a * x * x * x);
    const T th = std::tanh(u);
    return T(0.5) * (T(1) + th) + T(0.5) * x * (T(1) - th * th) * c * (T(1) + T(3) * a * x * x);
}

inline void check_matmul_shapes(const std::vector<int64_t>& a, const std::vector<int64_t>& b,
                                bool trans_a, bool trans_b) {
    if (a.size() != 2 || b.size() != 2) {
        throw ShapeError("matmul expects rank-2 operands, got " + Tensor::shape_str(a) + " and " +
                         Tensor::shape_str(b));
    }
    const int64_t ak = trans_a ? a[0] : a[1];
    const int64_t bk = trans_b ? b[1] : b[0];
    if (ak != bk) {
        throw ShapeError("matmul inner extents differ: " + Tensor::shape_str(a) +
                         (trans_a ? "^T" : "") + " vs " + Tensor::shape_str(b) +
                         (trans_b ? "^T" : ""));
    }
}

}  // namespace detail

namespace serial {

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b, bool trans_a = false,
                  bool trans_b = false) {
    detail::check_matmul_shapes(a.shape(), b.shape(), trans_a, trans_b);
    const int64_t m = trans_a ? a.dim(1) : a.dim(0);
    const int64_t k = trans_a ? a.dim(0) : a.dim(1);
    const int64_t n = trans_b ? b.dim(0) : b.dim(1);
    TensorT<T> out({m, n});
    for (int64_t i = 0; i < m; ++i) {
        detail::matmul_row(a.ptr(), b.ptr(), out.ptr(), i, m, k, n, trans_a, trans_b);
    }
    return out;
}

/// Softmax along `axis`; max is subtracted per slice so large inputs cannot overflow.
template <typename T>
TensorT<T> softmax(const TensorT<T>& x, int axis) {
    const auto& s = x.shape();
    if (axis < 0) axis += static_cast<int>(s.size());
    if (axis < 0 || axis >= static_cast<int>(s.size())) {
        throw ShapeError("softmax axis " + std::to_string(axis) + " invalid for " + x.shape_str());
    }
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= s[i];
    for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
    const int64_t len = s[axis];
    TensorT<T> y(x.shape());
    for (int64_t o = 0; o < outer; ++o) {
        for (int64_t i = 0; i < inner; ++i) {
            const int64_t base = o * len * inner + i;
            detail::softmax_slice(x.ptr() + base, y.ptr() + base, len, inner);
        }
    }
    return y;
}

template <typename T>
TensorT<T> layer_norm(const TensorT<T>& x, const TensorT<T>& gain, const TensorT<T>& bias, T eps) {
    const int64_t n = x.cols();
    if (gain.numel() != n || bias.numel() != n) {
        throw ShapeError("layer_norm gain/bias length must match last extent " + std::to_string(n));
    }
    TensorT<T> y(x.shape());
    const int64_t rows = x.rows();
    for (int64_t r = 0; r < rows; ++r) {
        detail::layer_norm_row(x.ptr() + r * n, gain.ptr(), bias.ptr(), y.ptr() + r * n, n, eps);
    }
    return y;
}

template <typename T>
TensorT<T> gelu(const TensorT<T>& x, Gelu variant) {
    TensorT<T> y(x.shape());
    const int64_t n = x.numel();
    for (int64_t i = 0; i < n; ++i) y.at(i) = detail::gelu_scalar(x.at(i), variant);
    return y;
}

}  // namespace serial

namespace par {

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b, bool trans_a = false,
                  bool trans_b = false) {
    detail::check_matmul_shapes(a.shape(), b.shape(), trans_a, trans_b);
    const int64_t m = trans_a ? a.dim(1) : a.dim(0);
    const int64_t k = trans_a ? a.dim(0) : a.dim(1);
    const int64_t n = trans_b ? b.dim(0) : b.dim(1);
    TensorT<T> out({m, n});
    const T* ap = a.ptr();
    const T* bp = b.ptr();
    T* op = out.ptr();
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < m; ++i) {
        detail::matmul_row(ap, bp, op, i, m, k, n, trans_a, trans_b);
    }
    return out;
}

template <typename T>
TensorT<T> softmax(const TensorT<T>& x, int axis) {
    const auto& s = x.shape();
    if (axis < 0) axis += static_cast<int>(s.size());
    if (axis < 0 || axis >= static_cast<int>(s.size())) {
        throw ShapeError("softmax axis " + std::to_string(axis) + " invalid for " + x.shape_str());
    }
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= s[i];
    for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
    const int64_t len = s[axis];
    TensorT<T> y(x.shape());
    const T* xp = x.ptr();
    T* yp = y.ptr();
    const int64_t slices = outer * inner;
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < slices; ++t) {
        const int64_t o = t / inner;
        const int64_t i = t % inner;
        const int64_t base = o * len * inner + i;
        detail::softmax_slice(xp + base, yp + base, len, inner);
    }
    return y;
}

template <typename T>
TensorT<T> layer_norm(const TensorT<T>& x, const TensorT<T>& gain, const TensorT<T>& bias, T eps) {
    const int64_t n = x.cols();
    if (gain.numel() != n || bias.numel() != n) {
        throw ShapeError("layer_norm gain/bias length must match last extent " + std::to_string(n));
    }
    TensorT<T> y(x.shape());
    const int64_t rows = x.rows();
    const T* xp = x.ptr();
    const T* gp = gain.ptr();
    const T* bp = bias.ptr();
    T* yp = y.ptr();
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < rows; ++r) {
        detail::layer_norm_row(xp + r * n, gp, bp, yp + r * n, n, eps);
    }
    return y;
}

template <typename T>
TensorT<T> gelu(const TensorT<T>& x, Gelu variant) {
    TensorT<T> y(x.shape());
    const int64_t n = x.numel();
    const T* xp = x.ptr();
    T* yp = y.ptr();
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) yp[i] = detail::gelu_scalar(xp[i], variant);
    return y;
}

}  // namespace par

// Work below these thresholds is not worth a parallel region.
inline constexpr int64_t kMatmulParThreshold = 1 << 17;   // m*k*n
inline constexpr int64_t kRowwiseParThreshold = 1 << 15;  // numel

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b, bool trans_a = false,
                  bool trans_b = false) {
    const int64_t m = trans_a ? a.dim(1) : a.dim(0);
    const int64_t k = trans_a ? a.dim(0) : a.dim(1);
    const int64_t n = trans_b ? b.dim(0) : b.dim(1);
    if (m * k * n >= kMatmulParThreshold) return par::matmul(a, b, trans_a, trans_b);
    return serial::matmul(a, b, trans_a, trans_b);
}

/// Gradients of C = A·B given upstream g: dA = g·B^T, dB = A^T·g.
template <typename T>
void matmul_backward(const TensorT<T>& g, const TensorT<T>& a, const TensorT<T>& b,
                     TensorT<T>& da, TensorT<T>& db) {
    da = matmul(g, b, false, true);
    db = matmul(a, g, true, false);
}

template <typename T>
TensorT<T> softmax(const TensorT<T>& x, int axis) {
    if (x.numel() >= kRowwiseParThreshold) return par::softmax(x, axis);
    return serial::softmax(x, axis);
}

/// dx given softmax output y: dx_i = y_i * (g_i - sum_j g_j y_j) per slice.
template <typename T>
TensorT<T> softmax_backward(const TensorT<T>& g, const TensorT<T>& y, int axis) {
    const auto& s = y.shape();
    if (axis < 0) axis += static_cast<int>(s.size());
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= s[i];
    for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
    const int64_t len = s[axis];
    TensorT<T> dx(y.shape());
    for (int64_t o = 0; o < outer; ++o) {
        for (int64_t i = 0; i < inner; ++i) {
            const int64_t base = o * len * inner + i;
            T dot = T(0);
            for (int64_t j = 0; j < len; ++j) {
                dot += g.at(base + j * inner) * y.at(base + j * inner);
            }
            for (int64_t j = 0; j < len; ++j) {
                const int64_t idx = base + j * inner;
                dx.at(idx) = y.at(idx) * (g.at(idx) - dot);
            }
        }
    }
    return dx;
}

template <typename T>
TensorT<T> layer_norm(const TensorT<T>& x, const TensorT<T>& gain, const TensorT<T>& bias, T eps) {
    if (x.numel() >= kRowwiseParThreshold) return par::layer_norm(x, gain, bias, eps);
    return serial::layer_norm(x, gain, bias, eps);
}

template <typename T>
void layer_norm_backward(const TensorT<T>& g, const TensorT<T>& x, const TensorT<T>& gain, T eps,
                         TensorT<T>& dx, TensorT<T>& dgain, TensorT<T>& dbias) {
    const int64_t n = x.cols();
    const int64_t rows = x.rows();
    dx = TensorT<T>(x.shape());
    dgain = TensorT<T>(gain.shape());
    dbias = TensorT<T>(gain.shape());
    for (int64_t r = 0; r < rows; ++r) {
        const T* xr = x.ptr() + r * n;
        const T* gr = g.ptr() + r * n;
        T* dxr = dx.ptr() + r * n;
        T mean = T(0);
        for (int64_t j = 0; j < n; ++j) mean += xr[j];
        mean /= T(n);
        T var = T(0);
        for (int64_t j = 0; j < n; ++j) {
            const T d = xr[j] - mean;
            var += d * d;
        }
        var /= T(n);
        const T inv_std = T(1) / std::sqrt(var + eps);
        T mean_dxh = T(0), mean_dxh_xh = T(0);
        for (int64_t j = 0; j < n; ++j) {
            const T xh = (xr[j] - mean) * inv_std;
            const T dxh = gr[j] * gain.at(j);
            dgain.at(j) += gr[j] * xh;
            dbias.at(j) += gr[j];
            mean_dxh += dxh;
            mean_dxh_xh += dxh * xh;
        }
        mean_dxh /= T(n);
        mean_dxh_xh /= T(n);
        for (int64_t j = 0; j < n; ++j) {
            const T xh = (xr[j] - mean) * inv_std;
            const T dxh = gr[j] * gain.at(j);
            dxr[j] = inv_std * (dxh - mean_dxh - xh * mean_dxh_xh);
        }
    }
}

template <typename T>
TensorT<T> gelu(const TensorT<T>& x, Gelu variant) {
    if (x.numel() >= kRowwiseParThreshold) return par::gelu(x, variant);
    return serial::gelu(x, variant);
}

template <typename T>
TensorT<T> gelu_backward(const TensorT<T>& g, const TensorT<T>& x, Gelu variant) {
    TensorT<T> dx(x.shape());
    const int64_t n = x.numel();
    for (int64_t i = 0; i < n; ++i) {
        dx.at(i) = g.at(i) * detail::gelu_grad_scalar(x.at(i), variant);
    }
    return dx;
}

}  // namespace signet::kernels
