#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "vismem/errors.hpp"

// Little-endian binary field helpers shared by the snapshot and feature-file
// formats. Byte order is pinned by the formats, not the host.

namespace vismem::binio {

template <typename T>
inline void put(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
    }
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
inline T get(std::istream& is, const char* what) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
        throw TruncationError(std::string("truncated while reading ") + what);
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
    }
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

inline void put_f32_array(std::ostream& os, const float* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data), sizeof(float) * count);
    } else {
        for (std::size_t i = 0; i < count; ++i) put<float>(os, data[i]);
    }
}

inline void get_f32_array(std::istream& is, float* data, std::size_t count, const char* what) {
    if constexpr (std::endian::native == std::endian::little) {
        if (!is.read(reinterpret_cast<char*>(data), sizeof(float) * count))
            throw TruncationError(std::string("truncated while reading ") + what);
    } else {
        for (std::size_t i = 0; i < count; ++i) data[i] = get<float>(is, what);
    }
}

inline void put_magic(std::ostream& os, const char magic[4]) { os.write(magic, 4); }

inline void check_magic(std::istream& is, const char magic[4], const std::string& what) {
    char got[4];
    if (!is.read(got, 4))
        throw TruncationError("truncated while reading " + what + " magic");
    if (std::memcmp(got, magic, 4) != 0)
        throw FormatError("bad magic for " + what);
}

}  // namespace vismem::binio
