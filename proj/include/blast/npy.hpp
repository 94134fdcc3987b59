#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "blast/errors.hpp"

namespace blast {

struct NpyArray {
    std::vector<std::uint64_t> shape;
    std::vector<double> data;
    bool from_float32 = false;

    std::uint64_t count() const {
        std::uint64_t c = 1;
        for (auto d : shape) c *= d;
        return c;
    }
};

namespace detail {

inline const char npy_magic[7] = "\x93NUMPY";

inline std::string npy_shape_string(const std::vector<std::uint64_t>& shape) {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        s += std::to_string(shape[i]);
        if (i + 1 < shape.size()) s += ", ";
    }
    if (shape.size() == 1) s += ",";
    s += ")";
    return s;
}

inline std::string parse_quoted(const std::string& dict, const std::string& key) {
    const auto kpos = dict.find("'" + key + "'");
    if (kpos == std::string::npos) throw CorruptHeader("header missing key " + key);
    auto pos = dict.find(':', kpos);
    if (pos == std::string::npos) throw CorruptHeader("malformed header near " + key);
    pos = dict.find_first_of("'\"", pos);
    if (pos == std::string::npos) throw CorruptHeader("malformed header near " + key);
    const char quote = dict[pos];
    const auto end = dict.find(quote, pos + 1);
    if (end == std::string::npos) throw CorruptHeader("unterminated string in header");
    return dict.substr(pos + 1, end - pos - 1);
}

inline bool parse_bool(const std::string& dict, const std::string& key) {
    const auto kpos = dict.find("'" + key + "'");
    if (kpos == std::string::npos) throw CorruptHeader("header missing key " + key);
    const auto pos = dict.find(':', kpos);
    if (pos == std::string::npos) throw CorruptHeader("malformed header near " + key);
    const auto t = dict.find("True", pos);
    const auto f = dict.find("False", pos);
    if (t != std::string::npos && (f == std::string::npos || t < f)) return true;
    if (f != std::string::npos) return false;
    throw CorruptHeader("malformed boolean in header");
}

inline std::vector<std::uint64_t> parse_shape(const std::string& dict) {
    const auto kpos = dict.find("'shape'");
    if (kpos == std::string::npos) throw CorruptHeader("header missing key shape");
    const auto open = dict.find('(', kpos);
    const auto close = dict.find(')', kpos);
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw CorruptHeader("malformed shape tuple");
    std::vector<std::uint64_t> shape;
    std::string token;
    for (size_t i = open + 1; i <= close; ++i) {
        const char ch = dict[i];
        if (ch == ',' || ch == ')') {
            if (!token.empty()) {
                try {
                    shape.push_back(std::stoull(token));
                } catch (const std::exception&) {
                    throw CorruptHeader("non-integer dimension in shape");
                }
                token.clear();
            }
        } else if (ch != ' ') {
            token += ch;
        }
    }
    return shape;
}

}  // namespace detail

inline void write_npy(std::ostream& out, const std::vector<std::uint64_t>& shape,
                      const double* data, std::uint64_t count) {
    std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': " +
                       detail::npy_shape_string(shape) + ", }";
    const size_t base = 6 + 2 + 2;
    size_t total = base + dict.size() + 1;
    const size_t padded = (total + 63) / 64 * 64;
    dict.append(padded - total, ' ');
    dict += '\n';
    out.write(detail::npy_magic, 6);
    out.put('\x01');
    out.put('\x00');
    const std::uint16_t hlen = std::uint16_t(dict.size());
    out.put(char(hlen & 0xff));
    out.put(char(hlen >> 8));
    out.write(dict.data(), std::streamsize(dict.size()));
    out.write(reinterpret_cast<const char*>(data), std::streamsize(count * sizeof(double)));
    if (!out) throw IoFailure("failed writing array payload");
}

inline NpyArray read_npy(std::istream& in) {
    char magic[6];
    if (!in.read(magic, 6) || std::memcmp(magic, detail::npy_magic, 6) != 0)
        throw CorruptHeader("not an NPY file");
    char version[2];
    if (!in.read(version, 2)) throw CorruptHeader("truncated version field");
    if (version[0] != 1 || version[1] != 0)
        throw CorruptHeader("only NPY format version 1.0 is supported");
    unsigned char lenbytes[2];
    if (!in.read(reinterpret_cast<char*>(lenbytes), 2)) throw CorruptHeader("truncated header");
    const std::uint16_t hlen = std::uint16_t(lenbytes[0]) | (std::uint16_t(lenbytes[1]) << 8);
    std::string dict(hlen, '\0');
    if (!in.read(dict.data(), hlen)) throw CorruptHeader("truncated header");

    const std::string descr = detail::parse_quoted(dict, "descr");
    if (detail::parse_bool(dict, "fortran_order"))
        throw UnsupportedDtype("only C-order arrays are supported");
    NpyArray arr;
    arr.shape = detail::parse_shape(dict);
    const std::uint64_t count = arr.count();
    if (descr == "<f8") {
        arr.data.resize(count);
        if (!in.read(reinterpret_cast<char*>(arr.data.data()),
                     std::streamsize(count * sizeof(double))))
            throw CorruptHeader("truncated array payload");
    } else if (descr == "<f4") {
        std::vector<float> raw(count);
        if (!in.read(reinterpret_cast<char*>(raw.data()),
                     std::streamsize(count * sizeof(float))))
            throw CorruptHeader("truncated array payload");
        arr.data.assign(raw.begin(), raw.end());
        arr.from_float32 = true;
    } else {
        throw UnsupportedDtype("unsupported dtype " + descr +
                               "; expected little-endian <f8 or <f4");
    }
    return arr;
}

}  // namespace blast
