#include "freshfinger/sequences.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace freshfinger {

namespace {

constexpr std::string_view kPrngComment = "# prng: mt19937_64, uniform draws by rejection sampling";

[[noreturn]] void reject(const SequenceSpec& spec, const std::string& what) {
    throw std::invalid_argument(std::string(to_string(spec.kind)) + " sequence: " + what);
}

std::int64_t parse_int(std::string_view token, const std::string& context) {
    std::int64_t v = 0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (token.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument(context + ": not an integer: '" + std::string(token) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view token, const std::string& context) {
    std::uint64_t v = 0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (token.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument(context + ": not an unsigned integer: '" + std::string(token) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// "# spec: kind=strided n=16 m=8 K=4 r=0 seed=1"
std::optional<SequenceSpec> parse_spec_comment(std::string_view line) {
    constexpr std::string_view prefix = "# spec:";
    if (!line.starts_with(prefix)) return std::nullopt;
    SequenceSpec spec;
    bool have_kind = false;
    for (std::string_view field : split_ws(line.substr(prefix.size()))) {
        const std::size_t eq = field.find('=');
        if (eq == std::string_view::npos) return std::nullopt;
        const std::string_view name = field.substr(0, eq);
        const std::string_view value = field.substr(eq + 1);
        if (name == "kind") {
            const auto kind = parse_sequence_kind(value);
            if (!kind) return std::nullopt;
            spec.kind = *kind;
            have_kind = true;
        } else if (name == "n") {
            spec.n = parse_int(value, "spec comment");
        } else if (name == "m") {
            spec.m = parse_int(value, "spec comment");
        } else if (name == "K") {
            spec.K = parse_int(value, "spec comment");
        } else if (name == "r") {
            spec.r = parse_int(value, "spec comment");
        } else if (name == "seed") {
            spec.seed = parse_uint(value, "spec comment");
        }
    }
    if (!have_kind) return std::nullopt;
    return spec;
}

}  // namespace

std::string_view to_string(SequenceKind kind) {
    switch (kind) {
        case SequenceKind::interleaved: return "interleaved";
        case SequenceKind::strided: return "strided";
        case SequenceKind::warmup_uniform: return "warmup_uniform";
        case SequenceKind::uniform: return "uniform";
        case SequenceKind::round_robin: return "round_robin";
        case SequenceKind::file: return "file";
    }
    return "unknown";
}

std::optional<SequenceKind> parse_sequence_kind(std::string_view text) {
    std::string s(text);
    for (char& c : s) {
        if (c == '-') c = '_';
    }
    for (SequenceKind k : {SequenceKind::interleaved, SequenceKind::strided, SequenceKind::warmup_uniform,
                           SequenceKind::uniform, SequenceKind::round_robin, SequenceKind::file}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

KeySampler::KeySampler(std::uint64_t seed) : engine_(seed) {}

Key KeySampler::uniform(Key lo, Key hi) {
    if (lo > hi) throw std::invalid_argument("key sampler: empty range");
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    // Values below 2^64 mod range would bias the modulo; draw again.
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t u = engine_();
    while (u < threshold) u = engine_();
    return lo + static_cast<Key>(u % range);
}

std::vector<std::string> validate(const SequenceSpec& spec) {
    std::vector<std::string> warnings;
    if (spec.n < 1) reject(spec, "n must be positive");
    if (spec.m < 0) reject(spec, "m must be non-negative");
    switch (spec.kind) {
        case SequenceKind::interleaved:
            if (spec.n % 2 != 0) reject(spec, "n must be even");
            if (spec.m % spec.n != 0) reject(spec, "n must divide m");
            break;
        case SequenceKind::strided: {
            if (spec.K < 1) reject(spec, "K must be positive");
            if (spec.n % (2 * spec.K) != 0) reject(spec, "2K must divide n");
            const Key cycle = spec.n / spec.K;
            if (spec.m % cycle != 0) reject(spec, "the cycle length n/K must divide m");
            const double n = static_cast<double>(spec.n);
            const double k = static_cast<double>(spec.K);
            if (k < std::pow(n, 0.25) || k > std::sqrt(n)) {
                warnings.push_back("strided: K=" + std::to_string(spec.K) + " outside [n^(1/4), sqrt(n)]");
            }
            break;
        }
        case SequenceKind::warmup_uniform:
            if (spec.r < 1 || spec.r > spec.n) reject(spec, "r must lie in [1, n]");
            if (static_cast<double>(spec.m) < 2.0 * static_cast<double>(spec.r) * std::log2(static_cast<double>(spec.n))) {
                reject(spec, "m must be at least 2 r log2 n");
            }
            break;
        case SequenceKind::uniform:
        case SequenceKind::round_robin:
            break;
        case SequenceKind::file:
            reject(spec, "file sequences are read, not generated");
    }
    return warnings;
}

std::vector<Key> generate(const SequenceSpec& spec) {
    validate(spec);
    const auto m = static_cast<std::size_t>(spec.m);
    const Key n = spec.n;
    std::vector<Key> out;
    out.reserve(m);
    switch (spec.kind) {
        case SequenceKind::interleaved:
            while (out.size() < m) {
                for (Key i = 1; i <= n / 2; ++i) {
                    out.push_back(i);
                    out.push_back(n / 2 + i);
                }
            }
            break;
        case SequenceKind::strided:
            while (out.size() < m) {
                for (Key v = spec.K; v <= n / 2; v += spec.K) {
                    out.push_back(v);
                    out.push_back(n / 2 + v);
                }
            }
            break;
        case SequenceKind::warmup_uniform: {
            KeySampler sampler(spec.seed);
            for (std::size_t i = 1; i <= m; ++i) {
                out.push_back(static_cast<Key>(i) <= spec.r ? static_cast<Key>(i) : sampler.uniform(1, spec.r));
            }
            break;
        }
        case SequenceKind::uniform: {
            KeySampler sampler(spec.seed);
            for (std::size_t i = 0; i < m; ++i) out.push_back(sampler.uniform(1, n));
            break;
        }
        case SequenceKind::round_robin:
            for (std::size_t i = 0; i < m; ++i) out.push_back(static_cast<Key>(i % static_cast<std::size_t>(n)) + 1);
            break;
        case SequenceKind::file:
            break;
    }
    out.resize(m);
    return out;
}

std::string describe(const SequenceSpec& spec) {
    std::ostringstream os;
    os << "kind=" << to_string(spec.kind) << " n=" << spec.n << " m=" << spec.m << " K=" << spec.K
       << " r=" << spec.r << " seed=" << spec.seed;
    return os.str();
}

std::string format_sequence(Key n, const std::vector<Key>& keys, const std::optional<SequenceSpec>& spec) {
    for (Key k : keys) {
        if (k < 1 || k > n) throw std::out_of_range("sequence: key " + std::to_string(k) + " outside [1, n]");
    }
    std::string out;
    out.reserve(keys.size() * 7 + 128);
    out += std::to_string(n) + " " + std::to_string(keys.size()) + "\n";
    out += kPrngComment;
    out += "\n";
    if (spec) out += "# spec: " + describe(*spec) + "\n";
    for (Key k : keys) {
        out += std::to_string(k);
        out += '\n';
    }
    return out;
}

SequenceFile parse_sequence(std::string_view text) {
    SequenceFile file;
    bool have_header = false;
    std::size_t expected = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const std::string context = "sequence line " + std::to_string(line_no);
        if (line.starts_with('#')) {
            if (auto spec = parse_spec_comment(trim(line))) file.spec = spec;
            continue;
        }
        line = trim(line);
        if (line.empty()) continue;
        if (!have_header) {
            const auto tokens = split_ws(line);
            if (tokens.size() != 2) throw std::invalid_argument(context + ": header must be \"n m\"");
            file.n = parse_int(tokens[0], context);
            const std::int64_t m = parse_int(tokens[1], context);
            if (file.n < 1 || m < 0) throw std::invalid_argument(context + ": header values out of range");
            expected = static_cast<std::size_t>(m);
            file.keys.reserve(expected);
            have_header = true;
            continue;
        }
        const Key k = parse_int(line, context);
        if (k < 1 || k > file.n) {
            throw std::out_of_range(context + ": key " + std::to_string(k) + " outside [1, " + std::to_string(file.n) + "]");
        }
        file.keys.push_back(k);
    }
    if (!have_header) throw std::invalid_argument("sequence: missing header");
    if (file.keys.size() != expected) {
        throw std::invalid_argument("sequence: header announces " + std::to_string(expected) + " keys, found " +
                                    std::to_string(file.keys.size()));
    }
    return file;
}

void write_sequence_file(const std::filesystem::path& path, Key n, const std::vector<Key>& keys,
                         const std::optional<SequenceSpec>& spec) {
    const std::string text = format_sequence(n, keys, spec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

SequenceFile read_sequence_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_sequence(buffer.str());
}

}  // namespace freshfinger
