// SPDX-License-Identifier: Apache-2.0
//
// prmimo: channel estimation and extrapolation for pattern-reconfigurable MIMO arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef PRMIMO_BINIO_HPP
#define PRMIMO_BINIO_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "prmimo/errors.hpp"

namespace prmimo
{
    // Little-endian byte buffer used for all binary file formats.
    class ByteWriter
    {
    public:
        void u32(std::uint32_t v)
        {
            for (int i = 0; i < 4; ++i)
                bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }

        void u64(std::uint64_t v)
        {
            for (int i = 0; i < 8; ++i)
                bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }

        void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

        void f32(float v)
        {
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            u32(bits);
        }

        void f64(double v)
        {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            u64(bits);
        }

        void magic(const char tag[4])
        {
            bytes_.insert(bytes_.end(), tag, tag + 4);
        }

        const std::vector<std::uint8_t> &bytes() const { return bytes_; }
        std::size_t size() const { return bytes_.size(); }

    private:
        std::vector<std::uint8_t> bytes_;
    };

    // Reader over a fully loaded buffer. Any read past the end throws a
    // format_error carrying the offending offset.
    class ByteReader
    {
    public:
        explicit ByteReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

        std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
        std::uint64_t u64() { return take(8); }
        std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

        float f32()
        {
            const std::uint32_t bits = u32();
            float v;
            std::memcpy(&v, &bits, 4);
            return v;
        }

        double f64()
        {
            const std::uint64_t bits = u64();
            double v;
            std::memcpy(&v, &bits, 8);
            return v;
        }

        std::string magic()
        {
            require(4, "magic tag");
            std::string tag(reinterpret_cast<const char *>(bytes_.data()) + pos_, 4);
            pos_ += 4;
            return tag;
        }

        std::size_t offset() const { return pos_; }
        std::size_t size() const { return bytes_.size(); }
        const std::vector<std::uint8_t> &bytes() const { return bytes_; }

        void require(std::size_t n, const char *what)
        {
            if (pos_ + n > bytes_.size())
                throw format_error(std::string("truncated file while reading ") + what +
                                       ": need " + std::to_string(n) + " bytes, have " +
                                       std::to_string(bytes_.size() - pos_),
                                   pos_);
        }

    private:
        std::uint64_t take(int n)
        {
            require(static_cast<std::size_t>(n), "integer field");
            std::uint64_t v = 0;
            for (int i = 0; i < n; ++i)
                v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
            pos_ += static_cast<std::size_t>(n);
            return v;
        }

        std::vector<std::uint8_t> bytes_;
        std::size_t pos_ = 0;
    };

    // FNV-1a, the content checksum of the dataset format.
    inline std::uint64_t fnv1a(const std::uint8_t *data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            h ^= data[i];
            h *= 0x100000001B3ULL;
        }
        return h;
    }

    std::vector<std::uint8_t> read_file_bytes(const std::string &path);
    void write_file_bytes(const std::string &path, const std::vector<std::uint8_t> &bytes);
}

#endif
