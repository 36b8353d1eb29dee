// Copyright 2026-present the acm project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "acm/error.hpp"

// Little-endian primitives shared by every on-disk format.
namespace acm::io {

template <typename T>
T to_little_endian(T value) noexcept {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::endian::native == std::endian::little) {
        return value;
    } else {
        std::array<unsigned char, sizeof(T)> bytes;
        std::memcpy(bytes.data(), &value, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
        std::memcpy(&value, bytes.data(), sizeof(T));
        return value;
    }
}

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <typename T>
    void put(T value) {
        value = to_little_endian(value);
        out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
        check();
    }

    template <typename T>
    void put_array(std::span<const T> values) {
        if constexpr (std::endian::native == std::endian::little) {
            out_.write(reinterpret_cast<const char*>(values.data()),
                       static_cast<std::streamsize>(values.size_bytes()));
            check();
        } else {
            for (T v : values) {
                put(v);
            }
        }
    }

    void put_bytes(std::string_view bytes) {
        out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        check();
    }

private:
    void check() {
        if (!out_) {
            throw Error(ErrorCode::Io, "write failed");
        }
    }

    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <typename T>
    T get() {
        T value;
        read_raw(&value, sizeof(T));
        return to_little_endian(value);
    }

    template <typename T>
    void get_array(std::span<T> values) {
        read_raw(values.data(), values.size_bytes());
        if constexpr (std::endian::native != std::endian::little) {
            for (T& v : values) {
                v = to_little_endian(v);
            }
        }
    }

    void expect_magic(std::string_view magic) {
        std::string buf(magic.size(), '\0');
        in_.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in_.gcount() != static_cast<std::streamsize>(buf.size()) || buf != magic) {
            throw Error(ErrorCode::BadMagic, "unexpected file signature");
        }
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    void read_raw(void* dst, std::size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            throw Error(ErrorCode::TruncatedFile, "unexpected end of data");
        }
    }

    std::istream& in_;
};

}  // namespace acm::io
