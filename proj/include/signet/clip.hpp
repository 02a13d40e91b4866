#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "signet/errors.hpp"
#include "signet/tensor.hpp"

namespace signet {

/// Frame rate as an exact rational (frames per second).
struct Fps {
    uint32_t num = 30;
    uint32_t den = 1;

    double hz() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool operator==(const Fps& o) const {
        return static_cast<uint64_t>(num) * o.den == static_cast<uint64_t>(o.num) * den;
    }
    bool operator<(const Fps& o) const {
        return static_cast<uint64_t>(num) * o.den < static_cast<uint64_t>(o.num) * den;
    }
    bool operator<=(const Fps& o) const { return *this < o || *this == o; }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

/// A decoded video clip: frames in [0,1] (or normalized values downstream of
/// a mean/std step), the frame rate, and per-frame provenance flags marking
/// frames that were created by temporal upsampling or padding rather than
/// captured by the camera.
struct ClipTensor {
    Tensor frames;  // [T x H x W x 3]
    Fps fps;
    std::vector<uint8_t> dup_flags;  // length T

    ClipTensor() = default;
    ClipTensor(Tensor f, Fps r) : frames(std::move(f)), fps(r) {
        check_frames();
        dup_flags.assign(static_cast<size_t>(t()), 0);
    }
    ClipTensor(Tensor f, Fps r, std::vector<uint8_t> flags)
        : frames(std::move(f)), fps(r), dup_flags(std::move(flags)) {
        check_frames();
        if (static_cast<int64_t>(dup_flags.size()) != t()) {
            throw ValidationError("dup_flags length " + std::to_string(dup_flags.size()) +
                                  " does not match frame count " + std::to_string(t()));
        }
    }

    int64_t t() const { return frames.dim(0); }
    int64_t h() const { return frames.dim(1); }
    int64_t w() const { return frames.dim(2); }
    int64_t c() const { return frames.dim(3); }

    int64_t dup_count() const {
        int64_t n = 0;
        for (uint8_t f : dup_flags) n += (f != 0);
        return n;
    }

private:
    void check_frames() const {
        if (frames.rank() != 4 || frames.dim(3) != 3) {
            throw ShapeError("clip frames must be [T x H x W x 3], got " + frames.shape_str());
        }
    }
};

}  // namespace signet
