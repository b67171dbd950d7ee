#include "logembed/common.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace logembed {

int exit_code_for(ErrorClass cls) {
    switch (cls) {
        case ErrorClass::Parse: return 2;
        case ErrorClass::EmptyCorpus: return 2;
        case ErrorClass::Io: return 3;
        case ErrorClass::DimensionMismatch: return 4;
        case ErrorClass::IndexOutOfRange: return 4;
        case ErrorClass::NonFiniteLoss: return 5;
        case ErrorClass::UnknownToken: return 6;
        case ErrorClass::MissingArtifact: return 7;
        case ErrorClass::LineageMismatch: return 8;
        case ErrorClass::InvalidConfig: return 9;
        case ErrorClass::SingleClassCorpus: return 9;
        case ErrorClass::GateFailed: return 10;
    }
    return 1;
}

std::string hex_u64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

uint64_t parse_hex_u64(const std::string& s) {
    if (s.empty()) throw Error(ErrorClass::Parse, "empty hex value");
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 16);
    if (end == nullptr || *end != '\0')
        throw Error(ErrorClass::Parse, "invalid hex value: " + s);
    return v;
}

std::string fmt_g(double v, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
    return buf;
}

bool valid_utf8(const std::string& s) {
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    size_t n = s.size();
    size_t i = 0;
    while (i < n) {
        unsigned char c = p[i];
        size_t len;
        uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (size_t k = 1; k < len; ++k) {
            if ((p[i + k] & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (p[i + k] & 0x3F);
        }
        // overlong encodings, surrogates, out of range
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10FFFF) return false;
        if (cp >= 0xD800 && cp <= 0xDFFF) return false;
        i += len;
    }
    return true;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorClass::Io, "cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorClass::Io, "read failure: " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorClass::Io, "cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorClass::Io, "write failure: " + path);
}

bool file_exists(const std::string& path) {
    std::error_code ec;
    return std::filesystem::exists(path, ec);
}

void require_artifact(const std::string& path, const std::string& what) {
    if (!file_exists(path))
        throw Error(ErrorClass::MissingArtifact, "missing " + what + ": " + path);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        std::string line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = nl + 1;
    }
    return lines;
}

}  // namespace logembed
