#include "signet/clip_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace signet {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'N', 'F'};
constexpr uint16_t kVersion = 1;
constexpr uint8_t kDtypeU8 = 0;

template <typename T>
void put_le(std::string& out, T v) {
    for (size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

class Reader {
public:
    Reader(const std::string& buf, const std::string& path) : buf_(buf), path_(path) {}

    template <typename T>
    T le() {
        need(sizeof(T));
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return v;
    }

    const unsigned char* bytes(size_t n) {
        need(n);
        const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + pos_);
        pos_ += n;
        return p;
    }

    size_t remaining() const { return buf_.size() - pos_; }

private:
    void need(size_t n) {
        if (pos_ + n > buf_.size()) {
            throw FormatError("truncated clip container: " + path_);
        }
    }
    const std::string& buf_;
    std::string path_;
    size_t pos_ = 0;
};

}  // namespace

ClipTensor read_clip(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact(path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(buf, path);

    const unsigned char* magic = r.bytes(4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("bad magic in clip container: " + path);
    }
    const uint16_t version = r.le<uint16_t>();
    if (version != kVersion) {
        throw FormatError("unsupported clip container version " + std::to_string(version) +
                          " in " + path);
    }
    const uint32_t t = r.le<uint32_t>();
    const uint32_t h = r.le<uint32_t>();
    const uint32_t w = r.le<uint32_t>();
    const uint32_t c = r.le<uint32_t>();
    const uint32_t fps_num = r.le<uint32_t>();
    const uint32_t fps_den = r.le<uint32_t>();
    const uint8_t dtype = r.le<uint8_t>();
    if (dtype != kDtypeU8) {
        throw FormatError("unknown dtype tag " + std::to_string(dtype) + " in " + path);
    }
    if (t == 0 || h == 0 || w == 0 || c != 3 || fps_num == 0 || fps_den == 0) {
        throw FormatError("invalid clip header dims in " + path);
    }

    std::vector<uint8_t> flags(t);
    const unsigned char* fp = r.bytes(t);
    std::memcpy(flags.data(), fp, t);

    const size_t payload = static_cast<size_t>(t) * h * w * c;
    const unsigned char* px = r.bytes(payload);
    if (r.remaining() != 0) {
        throw FormatError("trailing bytes after payload in " + path);
    }

    Tensor frames({t, h, w, c});
    for (size_t i = 0; i < payload; ++i) {
        frames.at(static_cast<int64_t>(i)) = static_cast<float>(px[i]) / 255.0f;
    }
    return ClipTensor(std::move(frames), Fps{fps_num, fps_den}, std::move(flags));
}

void write_clip(const std::string& path, const ClipTensor& clip) {
    std::string out;
    const size_t payload = static_cast<size_t>(clip.frames.numel());
    out.reserve(27 + clip.dup_flags.size() + payload);
    out.append(kMagic, 4);
    put_le<uint16_t>(out, kVersion);
    put_le<uint32_t>(out, static_cast<uint32_t>(clip.t()));
    put_le<uint32_t>(out, static_cast<uint32_t>(clip.h()));
    put_le<uint32_t>(out, static_cast<uint32_t>(clip.w()));
    put_le<uint32_t>(out, static_cast<uint32_t>(clip.c()));
    put_le<uint32_t>(out, clip.fps.num);
    put_le<uint32_t>(out, clip.fps.den);
    out.push_back(static_cast<char>(kDtypeU8));
    out.append(reinterpret_cast<const char*>(clip.dup_flags.data()), clip.dup_flags.size());
    for (int64_t i = 0; i < clip.frames.numel(); ++i) {
        const float v = clip.frames.at(i);
        const float clamped = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
        out.push_back(static_cast<char>(static_cast<uint8_t>(std::lround(clamped * 255.0f))));
    }

    std::ofstream of(path, std::ios::binary | std::ios::trunc);
    if (!of) throw RuntimeFailure("cannot open for write: " + path);
    of.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!of) throw RuntimeFailure("write failed: " + path);
}

}  // namespace signet
