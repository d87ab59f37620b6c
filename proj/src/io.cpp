#include "nlstring/io.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace nlstring::io {

std::string fmt(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    if (r.ec != std::errc{}) throw std::runtime_error("fmt: to_chars failed");
    return std::string(buf, r.ptr);
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(long v) { return std::to_string(v); }
std::string fmt(long long v) { return std::to_string(v); }

int worker_thread_count() {
    if (const char* env = std::getenv("NLSTRING_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1)
            throw std::invalid_argument("NLSTRING_THREADS must be a positive integer");
        return static_cast<int>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace nlstring::io
