#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "freshfinger/hierarchy.hpp"
#include "freshfinger/sequences.hpp"

namespace freshfinger {

enum class StructureKind { ff, ff_p1, ff_p3, bst, splay };

/// CLI spelling: ff, ff-p1, ff-p3, bst, splay.
std::string_view to_string(StructureKind kind);
std::optional<StructureKind> parse_structure_kind(std::string_view text);
bool is_fresh_finger(StructureKind kind);
EvictionPolicy policy_of(StructureKind kind);

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvariantError : std::runtime_error {
    InvariantError(std::uint64_t access, std::vector<Violation> found);
    std::uint64_t access;
    std::vector<Violation> violations;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    StructureKind structure = StructureKind::ff;
    std::int64_t audit_every = 1;
    /// Accesses 1..dense_prefix are audited regardless of audit_every.
    std::int64_t dense_prefix = 0;
};

struct OracleCells {
    std::int64_t w = 0;
    double su = 0;
    double additive = 0;
    double theorem2 = 0;
};

struct TraceRow {
    std::uint64_t i = 0;
    Key key = 0;
    int found_level = 0;
    std::uint64_t cmp_descent = 0;
    std::uint64_t cmp_final = 0;
    std::uint64_t cmp_restructure = 0;
    std::uint64_t cmp_total = 0;
    std::uint64_t restructure_steps = 0;  // not part of the CSV
    std::optional<OracleCells> oracle;
};

inline constexpr std::string_view kTraceHeader =
    "i,key,found_level,cmp_descent,cmp_final,cmp_restructure,cmp_total,w_i,su,additive,theorem2_bound";

struct FitReport {
    std::optional<double> c1;  // empty when every bound is equal
    double c2 = 0;
    double max_ratio = 0;
    std::size_t rows = 0;
};

/// Least squares cost ~ c1 * bound + c2 over rows carrying oracle values,
/// plus the largest cost / bound. Throws UsageError below `min_rows` rows.
FitReport fit_rows(std::span<const TraceRow> rows, std::size_t min_rows = 100);

struct RunSummary {
    StructureKind structure = StructureKind::ff;
    Key n = 0;
    std::optional<SequenceSpec> spec;
    std::string digest;
    std::uint64_t accesses = 0;

    std::uint64_t cmp_total = 0;
    std::uint64_t cmp_descent = 0;
    std::uint64_t cmp_final = 0;
    std::uint64_t cmp_restructure = 0;
    std::uint64_t restructure_steps = 0;
    /// Largest (restructure comparisons + structural steps) / found level.
    double restructure_per_level_max = 0;

    std::uint64_t audited = 0;
    double su_total = 0;        // over audited rows
    double theorem2_total = 0;  // over audited rows

    // Accesses found at level j >= 2 whose key was seen before, and how many
    // of them had a working-set number of at least the capacity of level j-1.
    std::uint64_t floor_checked = 0;
    std::uint64_t floor_held = 0;

    std::uint64_t invariant_checks = 0;
    std::uint64_t subset_violations = 0;
    bool invariants_ok = true;

    std::optional<FitReport> fit;

    double average_cmp() const { return accesses ? static_cast<double>(cmp_total) / static_cast<double>(accesses) : 0; }
};

struct RunResult {
    std::vector<TraceRow> rows;
    RunSummary summary;
};

/// FNV-1a over n and the keys; identifies a sequence across summaries.
std::string sequence_digest(Key n, std::span<const Key> keys);

/// Replays a sequence through one structure, auditing the selected rows with
/// the oracle and, for fresh-finger structures, checking invariants there.
/// Throws UsageError for a bad config and InvariantError on a violation
/// (subset violations are only counted under strict FIFO).
RunResult replay(const RunConfig& config, Key n, std::span<const Key> keys,
                 const std::optional<SequenceSpec>& spec = std::nullopt);

std::string format_trace(std::span<const TraceRow> rows);
std::vector<TraceRow> parse_trace(std::string_view text);

nlohmann::json summary_to_json(const RunSummary& summary);

struct CompareRow {
    std::string structure;
    double average = 0;
    double ratio = 0;  // average / average of the first summary
};

/// Throws UsageError unless there are at least two summaries over one sequence.
std::vector<CompareRow> compare_summaries(std::span<const nlohmann::json> summaries);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace freshfinger
