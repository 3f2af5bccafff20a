#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "freshfinger/finger_tree.hpp"

namespace freshfinger {

enum class SequenceKind { interleaved, strided, warmup_uniform, uniform, round_robin, file };

std::string_view to_string(SequenceKind kind);
/// Accepts both `warmup_uniform` and `warmup-uniform` spellings.
std::optional<SequenceKind> parse_sequence_kind(std::string_view text);

struct SequenceSpec {
    SequenceKind kind = SequenceKind::uniform;
    Key n = 0;
    std::int64_t m = 0;
    Key K = 0;              // strided only
    Key r = 0;              // warmup_uniform only
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument naming the violated constraint. Returns
/// advisory warnings (for instance a stride outside [n^(1/4), sqrt(n)]).
std::vector<std::string> validate(const SequenceSpec& spec);

/// Deterministic in (spec, seed). Random kinds draw from mt19937_64 with
/// rejection sampling, so output is identical across platforms.
std::vector<Key> generate(const SequenceSpec& spec);

/// Uniform integer in [lo, hi] from a 64-bit Mersenne twister by rejection.
class KeySampler {
public:
    explicit KeySampler(std::uint64_t seed);
    Key uniform(Key lo, Key hi);

private:
    std::mt19937_64 engine_;
};

struct SequenceFile {
    Key n = 0;
    std::vector<Key> keys;
    std::optional<SequenceSpec> spec;  // from a "# spec:" comment, when present
};

/// Line 1 "n m", then m keys one per line; lines starting with '#' are comments.
void write_sequence_file(const std::filesystem::path& path, Key n, const std::vector<Key>& keys,
                         const std::optional<SequenceSpec>& spec = std::nullopt);
SequenceFile read_sequence_file(const std::filesystem::path& path);
SequenceFile parse_sequence(std::string_view text);
std::string format_sequence(Key n, const std::vector<Key>& keys,
                            const std::optional<SequenceSpec>& spec = std::nullopt);

std::string describe(const SequenceSpec& spec);

}  // namespace freshfinger
