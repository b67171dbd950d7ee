#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace logembed {

// Failure classes; the CLI maps each class to a distinct exit code.
enum class ErrorClass {
    Parse,
    Io,
    DimensionMismatch,
    NonFiniteLoss,
    UnknownToken,
    MissingArtifact,
    LineageMismatch,
    InvalidConfig,
    IndexOutOfRange,
    EmptyCorpus,
    SingleClassCorpus,
    GateFailed,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string msg, long line_no = -1)
        : std::runtime_error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")"
                                          : msg),
          cls_(cls),
          line_no_(line_no) {}

    ErrorClass cls() const { return cls_; }
    long line_no() const { return line_no_; }

private:
    ErrorClass cls_;
    long line_no_;
};

int exit_code_for(ErrorClass cls);

// Deterministic PRNG (splitmix64). std::uniform_*_distribution is
// implementation-defined, so all randomness in the library goes through
// this to keep artifacts bytewise reproducible.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1) with 53 random bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // [0, n), n > 0
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<size_t>(below(v.size()))];
    }

    // Independent stream derived from (seed, stream id).
    static uint64_t derive(uint64_t seed, uint64_t stream) {
        Rng r(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
        return r.next_u64();
    }
};

// FNV-1a 64-bit; used for artifact lineage hashes.
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

std::string hex_u64(uint64_t v);
uint64_t parse_hex_u64(const std::string& s);

// Fixed-format float printing so serialized artifacts are bytewise stable.
std::string fmt_g(double v, int significant_digits);
inline std::string fmt_g9(double v) { return fmt_g(v, 9); }
inline std::string fmt_g17(double v) { return fmt_g(v, 17); }

bool valid_utf8(const std::string& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

// Requires an existing input artifact; throws MissingArtifact otherwise.
void require_artifact(const std::string& path, const std::string& what);

std::vector<std::string> split_lines(const std::string& text);

}  // namespace logembed
