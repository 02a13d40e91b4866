#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "signet/errors.hpp"

namespace signet {

/// Dense row-major array of real values. 32-bit scalars are the runtime
/// default; verification suites instantiate the 64-bit variant because
/// finite-difference gradient checks are unreliable in single precision.
template <typename T>
class TensorT {
public:
    TensorT() = default;

    explicit TensorT(std::vector<int64_t> shape)
        : shape_(std::move(shape)), data_(checked_numel(shape_), T(0)) {}

    TensorT(std::vector<int64_t> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (static_cast<int64_t>(data_.size()) != checked_numel(shape_)) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_str(shape_));
        }
    }

    static TensorT zeros(std::vector<int64_t> shape) { return TensorT(std::move(shape)); }

    static TensorT full(std::vector<int64_t> shape, T v) {
        TensorT t(std::move(shape));
        for (auto& x : t.data_) x = v;
        return t;
    }

    /// 2-D convenience: row-major matrix from nested initializer lists.
    static TensorT matrix(std::initializer_list<std::initializer_list<T>> rows) {
        const int64_t m = static_cast<int64_t>(rows.size());
        const int64_t n = m > 0 ? static_cast<int64_t>(rows.begin()->size()) : 0;
        TensorT t({m, n});
        int64_t i = 0;
        for (const auto& r : rows) {
            if (static_cast<int64_t>(r.size()) != n) {
                throw ShapeError("ragged matrix initializer");
            }
            for (const auto& v : r) t.data_[i++] = v;
        }
        return t;
    }

    const std::vector<int64_t>& shape() const { return shape_; }
    int64_t dim(size_t i) const { return shape_.at(i); }
    size_t rank() const { return shape_.size(); }
    int64_t numel() const { return static_cast<int64_t>(data_.size()); }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }
    T* ptr() { return data_.data(); }
    const T* ptr() const { return data_.data(); }

    T& at(int64_t i) { return data_[static_cast<size_t>(i)]; }
    const T& at(int64_t i) const { return data_[static_cast<size_t>(i)]; }

    T& at(int64_t r, int64_t c) { return data_[static_cast<size_t>(r * shape_[1] + c)]; }
    const T& at(int64_t r, int64_t c) const { return data_[static_cast<size_t>(r * shape_[1] + c)]; }

    /// Rows of the trailing axis, i.e. numel / last extent.
    int64_t rows() const { return shape_.empty() ? 0 : numel() / shape_.back(); }
    int64_t cols() const { return shape_.empty() ? 0 : shape_.back(); }

    bool same_shape(const TensorT& o) const { return shape_ == o.shape_; }

    /// Reinterpret with a new shape of equal element count.
    TensorT reshaped(std::vector<int64_t> shape) const {
        TensorT t;
        t.shape_ = std::move(shape);
        if (checked_numel(t.shape_) != numel()) {
            throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(t.shape_) +
                             " changes element count");
        }
        t.data_ = data_;
        return t;
    }

    bool all_finite() const {
        for (const T& v : data_) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

    /// Cast between scalar precisions.
    template <typename U>
    TensorT<U> cast() const {
        std::vector<U> d(data_.size());
        for (size_t i = 0; i < data_.size(); ++i) d[i] = static_cast<U>(data_[i]);
        return TensorT<U>(shape_, std::move(d));
    }

    static std::string shape_str(const std::vector<int64_t>& s) {
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < s.size(); ++i) {
            if (i) os << "x";
            os << s[i];
        }
        os << "]";
        return os.str();
    }

    std::string shape_str() const { return shape_str(shape_); }

private:
    static int64_t checked_numel(const std::vector<int64_t>& shape) {
        int64_t n = 1;
        for (int64_t e : shape) {
            if (e <= 0) throw ShapeError("non-positive extent in shape " + shape_str(shape));
            n *= e;
        }
        return shape.empty() ? 0 : n;
    }

    std::vector<int64_t> shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

/// Learnable value paired with its gradient accumulator.
template <typename T>
struct ParameterT {
    std::string name;
    TensorT<T> value;
    TensorT<T> grad;

    ParameterT() = default;
    ParameterT(std::string name, TensorT<T> v)
        : name(std::move(name)), value(std::move(v)), grad(value.shape()) {}

    void reset_grad() {
        for (auto& g : grad.data()) g = T(0);
    }
};

using Parameter = ParameterT<float>;

}  // namespace signet
