#pragma once

#include <algorithm>
#include <cmath>

#include "signet/tensor.hpp"

namespace signet {

/// Central-difference gradient of a deterministic scalar function:
/// g_i = (f(x + h e_i) - f(x - h e_i)) / 2h. Verification oracle for every
/// analytic backward kernel; meaningful only in 64-bit precision.
template <typename T, typename F>
TensorT<T> finite_diff_grad(F&& f, const TensorT<T>& x, T h) {
    if (!(h > T(0))) throw ValidationError("finite_diff_grad requires h > 0");
    TensorT<T> g(x.shape());
    TensorT<T> xp = x;
    for (int64_t i = 0; i < x.numel(); ++i) {
        xp.at(i) = x.at(i) + h;
        const T fp = f(static_cast<const TensorT<T>&>(xp));
        xp.at(i) = x.at(i) - h;
        const T fm = f(static_cast<const TensorT<T>&>(xp));
        xp.at(i) = x.at(i);
        g.at(i) = (fp - fm) / (T(2) * h);
    }
    return g;
}

/// Worst per-element relative error between two gradients; elements where both
/// magnitudes are below `floor` compare as equal (avoids 0/0 on dead grads).
template <typename T>
double grad_rel_err(const TensorT<T>& a, const TensorT<T>& b, double floor = 1e-6) {
    if (!a.same_shape(b)) {
        throw ShapeError("grad_rel_err shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
    double worst = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) {
        const double av = static_cast<double>(a.at(i));
        const double bv = static_cast<double>(b.at(i));
        const double mag = std::max(std::abs(av), std::abs(bv));
        if (mag < floor) continue;
        worst = std::max(worst, std::abs(av - bv) / mag);
    }
    return worst;
}

}  // namespace signet
