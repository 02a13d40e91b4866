#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace signet::log {

enum class Level { quiet = 0, info = 1, debug = 2 };

// Verbosity comes from the SIGNET_LOG environment variable only
// (quiet | info | debug), default info.
inline Level level() {
    static Level lvl = [] {
        const char* v = std::getenv("SIGNET_LOG");
        if (v == nullptr) return Level::info;
        if (std::strcmp(v, "quiet") == 0) return Level::quiet;
        if (std::strcmp(v, "debug") == 0) return Level::debug;
        return Level::info;
    }();
    return lvl;
}

template <typename... Args>
void info(const char* fmt, Args... args) {
    if (level() >= Level::info) {
        std::fprintf(stderr, fmt, args...);
        std::fputc('\n', stderr);
    }
}

template <typename... Args>
void warn(const char* fmt, Args... args) {
    if (level() >= Level::info) {
        std::fprintf(stderr, "warning: ");
        std::fprintf(stderr, fmt, args...);
        std::fputc('\n', stderr);
    }
}

template <typename... Args>
void debug(const char* fmt, Args... args) {
    if (level() >= Level::debug) {
        std::fprintf(stderr, fmt, args...);
        std::fputc('\n', stderr);
    }
}

}  // namespace signet::log
