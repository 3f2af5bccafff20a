#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "freshfinger/sequences.hpp"

using namespace freshfinger;

namespace {

SequenceSpec spec_of(SequenceKind kind, Key n, std::int64_t m, Key K = 0, Key r = 0, std::uint64_t seed = 1) {
    return SequenceSpec{kind, n, m, K, r, seed};
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("sequences: interleaved pattern") {
    const std::vector<Key> s = generate(spec_of(SequenceKind::interleaved, 8, 16));
    const std::vector<Key> cycle{1, 5, 2, 6, 3, 7, 4, 8};
    REQUIRE(s.size() == 16);
    CHECK(std::vector<Key>(s.begin(), s.begin() + 8) == cycle);
    CHECK(std::vector<Key>(s.begin() + 8, s.end()) == cycle);

    const std::vector<Key> big = generate(spec_of(SequenceKind::interleaved, 256, 1024));
    for (std::size_t i = 2; i < big.size(); ++i) {
        if (i % 256 < 2) continue;
        REQUIRE(std::abs(big[i] - big[i - 2]) == 1);
    }
    CHECK_THROWS_AS(generate(spec_of(SequenceKind::interleaved, 7, 14)), std::invalid_argument);
    CHECK_THROWS_AS(generate(spec_of(SequenceKind::interleaved, 8, 12)), std::invalid_argument);
}

TEST_CASE("sequences: strided pattern") {
    const std::vector<Key> s = generate(spec_of(SequenceKind::strided, 16, 8, 4));
    CHECK(s == std::vector<Key>{4, 12, 8, 16, 4, 12, 8, 16});

    const Key n = 1024, K = 32;
    const std::vector<Key> big = generate(spec_of(SequenceKind::strided, n, 4 * n / K, K));
    std::set<Key> keys(big.begin(), big.end());
    std::set<Key> expected;
    for (Key v = K; v <= n / 2; v += K) {
        expected.insert(v);
        expected.insert(n / 2 + v);
    }
    CHECK(keys == expected);

    CHECK_THROWS_AS(generate(spec_of(SequenceKind::strided, 16, 8, 3)), std::invalid_argument);
    CHECK_THROWS_AS(generate(spec_of(SequenceKind::strided, 16, 6, 4)), std::invalid_argument);
    CHECK(validate(spec_of(SequenceKind::strided, 1024, 1024, 2)).size() == 1);
    CHECK(validate(spec_of(SequenceKind::strided, 1024, 1024, 32)).empty());
}

TEST_CASE("sequences: warmup then uniform") {
    const std::vector<Key> s = generate(spec_of(SequenceKind::warmup_uniform, 16, 64, 0, 4));
    REQUIRE(s.size() == 64);
    CHECK(std::vector<Key>(s.begin(), s.begin() + 4) == std::vector<Key>{1, 2, 3, 4});
    for (Key k : s) CHECK((k >= 1 && k <= 4));

    std::map<Key, int> freq;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::vector<Key> t = generate(spec_of(SequenceKind::warmup_uniform, 16, 1000, 0, 4, seed));
        for (std::size_t i = 4; i < t.size(); ++i) ++freq[t[i]];
    }
    const double expected = 20.0 * 996 / 4;
    for (Key k = 1; k <= 4; ++k) CHECK(std::abs(freq[k] - expected) < 0.05 * expected);

    CHECK_THROWS_AS(generate(spec_of(SequenceKind::warmup_uniform, 16, 10, 0, 4)), std::invalid_argument);
    CHECK_THROWS_AS(generate(spec_of(SequenceKind::warmup_uniform, 16, 1000, 0, 17)), std::invalid_argument);
}

TEST_CASE("sequences: determinism and seeds") {
    const SequenceSpec a = spec_of(SequenceKind::uniform, 1000, 5000, 0, 0, 42);
    CHECK(generate(a) == generate(a));
    SequenceSpec b = a;
    b.seed = 43;
    CHECK(generate(a) != generate(b));

    KeySampler s1(9), s2(9);
    for (int i = 0; i < 100; ++i) CHECK(s1.uniform(1, 7) == s2.uniform(1, 7));

    const std::vector<Key> rr = generate(spec_of(SequenceKind::round_robin, 3, 7));
    CHECK(rr == std::vector<Key>{1, 2, 3, 1, 2, 3, 1});
}

TEST_CASE("sequences: file round trip") {
    const SequenceSpec spec = spec_of(SequenceKind::interleaved, 8, 8);
    const std::vector<Key> s = generate(spec);
    const auto path = temp_file("ff_seq_roundtrip.txt");
    write_sequence_file(path, 8, s, spec);
    const SequenceFile f = read_sequence_file(path);
    CHECK(f.n == 8);
    CHECK(f.keys == s);
    REQUIRE(f.spec);
    CHECK(f.spec->kind == SequenceKind::interleaved);
    std::filesystem::remove(path);
}

TEST_CASE("sequences: parsing") {
    const SequenceFile f = parse_sequence("16 4\n# a comment\n4\n12\n8\n16\n");
    CHECK(f.n == 16);
    CHECK(f.keys == std::vector<Key>{4, 12, 8, 16});
    CHECK_FALSE(f.spec);

    CHECK_THROWS_AS(parse_sequence("16 1\n17\n"), std::out_of_range);
    CHECK_THROWS_AS(parse_sequence("16 1\nx\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sequence("16\n1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sequence("16 2\n1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sequence(""), std::invalid_argument);
    CHECK_THROWS_AS(read_sequence_file("/nonexistent/dir/seq.txt"), std::ios_base::failure);
    CHECK_THROWS_AS(format_sequence(4, {5}), std::out_of_range);
}

TEST_CASE("sequences: kind names") {
    CHECK(parse_sequence_kind("warmup-uniform") == SequenceKind::warmup_uniform);
    CHECK(parse_sequence_kind("round-robin") == SequenceKind::round_robin);
    CHECK(parse_sequence_kind("strided") == SequenceKind::strided);
    CHECK_FALSE(parse_sequence_kind("zigzag"));
}
