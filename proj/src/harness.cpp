#include "freshfinger/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <variant>

#include "freshfinger/baselines.hpp"
#include "freshfinger/oracle.hpp"

namespace freshfinger {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string describe_violations(std::uint64_t access, const std::vector<Violation>& found) {
    std::string out = "invariant violation after access " + std::to_string(access);
    for (const Violation& v : found) {
        out += "; level " + std::to_string(v.level) + " " + std::string(to_string(v.kind)) + ": " + v.message;
    }
    return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <class T>
T parse_number(std::string_view cell, std::size_t line_no) {
    T v{};
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc{} || ptr != end) {
        throw UsageError("trace line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
    }
    return v;
}

// One structure behind a uniform access call.
class Subject {
public:
    Subject(StructureKind kind, Key n) {
        switch (kind) {
            case StructureKind::bst: impl_.emplace<StaticBST>(n); break;
            case StructureKind::splay: impl_.emplace<SplayTree>(n); break;
            default: impl_.emplace<std::unique_ptr<FreshFingerDict>>(std::make_unique<FreshFingerDict>(n, policy_of(kind)));
        }
    }

    AccessRecord access(Key x) {
        if (auto* dict = std::get_if<std::unique_ptr<FreshFingerDict>>(&impl_)) return (*dict)->access(x);
        AccessRecord r;
        r.key = x;
        r.found_level = 1;
        if (auto* bst = std::get_if<StaticBST>(&impl_)) r.cmp_final = bst->access(x);
        else r.cmp_final = std::get<SplayTree>(impl_).access(x);
        r.cmp_total = r.cmp_final;
        return r;
    }

    FreshFingerDict* dict() {
        auto* p = std::get_if<std::unique_ptr<FreshFingerDict>>(&impl_);
        return p ? p->get() : nullptr;
    }

private:
    std::variant<std::monostate, StaticBST, SplayTree, std::unique_ptr<FreshFingerDict>> impl_;
};

}  // namespace

std::string_view to_string(StructureKind kind) {
    switch (kind) {
        case StructureKind::ff: return "ff";
        case StructureKind::ff_p1: return "ff-p1";
        case StructureKind::ff_p3: return "ff-p3";
        case StructureKind::bst: return "bst";
        case StructureKind::splay: return "splay";
    }
    return "unknown";
}

std::optional<StructureKind> parse_structure_kind(std::string_view text) {
    std::string s(text);
    std::replace(s.begin(), s.end(), '_', '-');
    if (s == "ff-p2") return StructureKind::ff;
    for (StructureKind k : {StructureKind::ff, StructureKind::ff_p1, StructureKind::ff_p3, StructureKind::bst,
                            StructureKind::splay}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

bool is_fresh_finger(StructureKind kind) {
    return kind == StructureKind::ff || kind == StructureKind::ff_p1 || kind == StructureKind::ff_p3;
}

EvictionPolicy policy_of(StructureKind kind) {
    switch (kind) {
        case StructureKind::ff_p1: return EvictionPolicy::strict_fifo;
        case StructureKind::ff_p3: return EvictionPolicy::full_refresh;
        default: return EvictionPolicy::skip_requeue;
    }
}

InvariantError::InvariantError(std::uint64_t at, std::vector<Violation> found)
    : std::runtime_error(describe_violations(at, found)), access(at), violations(std::move(found)) {}

FitReport fit_rows(std::span<const TraceRow> rows, std::size_t min_rows) {
    double sx = 0, sy = 0;
    std::size_t count = 0;
    FitReport fit;
    for (const TraceRow& r : rows) {
        if (!r.oracle) continue;
        const double x = r.oracle->theorem2;
        const double y = static_cast<double>(r.cmp_total);
        sx += x;
        sy += y;
        ++count;
        fit.max_ratio = std::max(fit.max_ratio, y / x);
    }
    if (count < min_rows) {
        throw UsageError("audit needs at least " + std::to_string(min_rows) + " audited rows, trace has " +
                         std::to_string(count));
    }
    fit.rows = count;
    const double mx = sx / static_cast<double>(count);
    const double my = sy / static_cast<double>(count);
    double sxx = 0, sxy = 0;
    for (const TraceRow& r : rows) {
        if (!r.oracle) continue;
        const double dx = r.oracle->theorem2 - mx;
        sxx += dx * dx;
        sxy += dx * (static_cast<double>(r.cmp_total) - my);
    }
    if (sxx > 1e-12 * static_cast<double>(count) * std::max(1.0, mx * mx)) {
        fit.c1 = sxy / sxx;
        fit.c2 = my - *fit.c1 * mx;
    } else {
        fit.c2 = my;
    }
    return fit;
}

std::string sequence_digest(Key n, std::span<const Key> keys) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(n));
    mix(keys.size());
    for (Key k : keys) mix(static_cast<std::uint64_t>(k));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunResult replay(const RunConfig& config, Key n, std::span<const Key> keys, const std::optional<SequenceSpec>& spec) {
    if (config.audit_every < 1) throw UsageError("audit_every must be at least 1");
    if (keys.size() <= 10000 && config.audit_every != 1) {
        throw UsageError("sequences of at most 10^4 accesses must be fully audited (audit_every = 1)");
    }
    if (n < 2) throw UsageError("n must be at least 2");

    RunResult result;
    RunSummary& s = result.summary;
    s.structure = config.structure;
    s.n = n;
    s.spec = spec;
    s.digest = sequence_digest(n, keys);
    result.rows.reserve(keys.size());

    Subject subject(config.structure, n);
    FreshFingerDict* dict = subject.dict();
    RecencyOracle oracle(n);
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);

    for (std::size_t idx = 0; idx < keys.size(); ++idx) {
        const Key x = keys[idx];
        if (x < 1 || x > n) throw UsageError("sequence key " + std::to_string(x) + " outside [1, n]");
        const std::uint64_t i = idx + 1;
        const bool audited = static_cast<std::int64_t>(i) <= config.dense_prefix ||
                             idx % static_cast<std::size_t>(config.audit_every) == 0;

        TraceRow row;
        if (audited) {
            const BoundBreakdown b = oracle.evaluate(x);
            row.oracle = OracleCells{b.w, b.su, b.additive, b.theorem2};
        }
        const AccessRecord rec = subject.access(x);
        oracle.record(x);

        row.i = i;
        row.key = x;
        row.found_level = rec.found_level;
        row.cmp_descent = rec.cmp_descent;
        row.cmp_final = rec.cmp_final;
        row.cmp_restructure = rec.cmp_restructure;
        row.cmp_total = rec.cmp_total;
        row.restructure_steps = rec.restructure_steps;

        s.cmp_total += rec.cmp_total;
        s.cmp_descent += rec.cmp_descent;
        s.cmp_final += rec.cmp_final;
        s.cmp_restructure += rec.cmp_restructure;
        s.restructure_steps += rec.restructure_steps;
        if (rec.found_level > 0) {
            s.restructure_per_level_max =
                std::max(s.restructure_per_level_max,
                         static_cast<double>(rec.cmp_restructure + rec.restructure_steps) / rec.found_level);
        }

        if (audited) {
            ++s.audited;
            s.su_total += row.oracle->su;
            s.theorem2_total += row.oracle->theorem2;
            if (dict && rec.found_level >= 2 && seen[static_cast<std::size_t>(x)]) {
                ++s.floor_checked;
                if (row.oracle->w >= dict->found_level_floor(rec.found_level)) ++s.floor_held;
            }
            if (dict) {
                std::vector<Violation> found = dict->check_invariants();
                ++s.invariant_checks;
                std::vector<Violation> fatal;
                for (Violation& v : found) {
                    if (v.kind == Violation::Kind::subset && config.structure == StructureKind::ff_p1) {
                        ++s.subset_violations;
                    } else {
                        fatal.push_back(std::move(v));
                    }
                }
                if (!fatal.empty()) {
                    s.invariants_ok = false;
                    throw InvariantError(i, std::move(fatal));
                }
            }
        }
        seen[static_cast<std::size_t>(x)] = true;
        result.rows.push_back(row);
    }
    s.accesses = keys.size();
    if (s.subset_violations > 0) s.invariants_ok = false;
    if (s.audited >= 100) s.fit = fit_rows(result.rows);
    return result;
}

std::string format_trace(std::span<const TraceRow> rows) {
    std::string out(kTraceHeader);
    out += '\n';
    for (const TraceRow& r : rows) {
        out += std::to_string(r.i) + ',' + std::to_string(r.key) + ',' + std::to_string(r.found_level) + ',' +
               std::to_string(r.cmp_descent) + ',' + std::to_string(r.cmp_final) + ',' +
               std::to_string(r.cmp_restructure) + ',' + std::to_string(r.cmp_total) + ',';
        if (r.oracle) {
            out += std::to_string(r.oracle->w) + ',' + format_double(r.oracle->su) + ',' +
                   format_double(r.oracle->additive) + ',' + format_double(r.oracle->theorem2);
        } else {
            out += ",,";
        }
        out += '\n';
    }
    return out;
}

std::vector<TraceRow> parse_trace(std::string_view text) {
    std::vector<TraceRow> rows;
    std::size_t line_no = 0;
    bool have_header = false;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!have_header) {
            if (line != kTraceHeader) throw UsageError("trace: unexpected header");
            have_header = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 11) throw UsageError("trace line " + std::to_string(line_no) + ": expected 11 cells");
        TraceRow r;
        r.i = parse_number<std::uint64_t>(cells[0], line_no);
        r.key = parse_number<Key>(cells[1], line_no);
        r.found_level = parse_number<int>(cells[2], line_no);
        r.cmp_descent = parse_number<std::uint64_t>(cells[3], line_no);
        r.cmp_final = parse_number<std::uint64_t>(cells[4], line_no);
        r.cmp_restructure = parse_number<std::uint64_t>(cells[5], line_no);
        r.cmp_total = parse_number<std::uint64_t>(cells[6], line_no);
        const bool any = !cells[7].empty() || !cells[8].empty() || !cells[9].empty() || !cells[10].empty();
        if (any) {
            OracleCells o;
            o.w = parse_number<std::int64_t>(cells[7], line_no);
            o.su = parse_number<double>(cells[8], line_no);
            o.additive = parse_number<double>(cells[9], line_no);
            o.theorem2 = parse_number<double>(cells[10], line_no);
            if (o.w < 0 || o.su < 0 || o.additive < 0 || o.theorem2 <= 0) {
                throw UsageError("trace line " + std::to_string(line_no) + ": oracle values out of range");
            }
            r.oracle = o;
        }
        rows.push_back(r);
    }
    if (!have_header) throw UsageError("trace: missing header");
    return rows;
}

nlohmann::json summary_to_json(const RunSummary& s) {
    using nlohmann::json;
    json spec = {{"n", s.n}, {"m", s.accesses}, {"digest", s.digest}};
    if (s.spec) {
        spec["kind"] = std::string(to_string(s.spec->kind));
        spec["K"] = s.spec->K;
        spec["r"] = s.spec->r;
        spec["seed"] = s.spec->seed;
    } else {
        spec["kind"] = "file";
    }
    const double m = s.accesses ? static_cast<double>(s.accesses) : 1.0;
    const double audited = s.audited ? static_cast<double>(s.audited) : 1.0;
    json fit = {{"c1", nullptr}, {"c2", nullptr}, {"max_ratio", nullptr}};
    if (s.fit) {
        if (s.fit->c1) fit["c1"] = *s.fit->c1;
        fit["c2"] = s.fit->c2;
        fit["max_ratio"] = s.fit->max_ratio;
        fit["rows"] = s.fit->rows;
    }
    return json{
        {"structure", std::string(to_string(s.structure))},
        {"sequence_spec", spec},
        {"totals",
         {{"accesses", s.accesses},
          {"cmp_total", s.cmp_total},
          {"cmp_descent", s.cmp_descent},
          {"cmp_final", s.cmp_final},
          {"cmp_restructure", s.cmp_restructure},
          {"restructure_steps", s.restructure_steps},
          {"audited_rows", s.audited},
          {"invariant_checks", s.invariant_checks},
          {"subset_violations", s.subset_violations},
          {"floor_checked", s.floor_checked},
          {"floor_held", s.floor_held}}},
        {"averages",
         {{"cmp_total", static_cast<double>(s.cmp_total) / m},
          {"cmp_descent", static_cast<double>(s.cmp_descent) / m},
          {"cmp_final", static_cast<double>(s.cmp_final) / m},
          {"cmp_restructure", static_cast<double>(s.cmp_restructure) / m},
          {"restructure_steps", static_cast<double>(s.restructure_steps) / m},
          {"su", s.su_total / audited},
          {"theorem2_bound", s.theorem2_total / audited}}},
        {"fit", fit},
        {"invariants_ok", s.invariants_ok},
    };
}

std::vector<CompareRow> compare_summaries(std::span<const nlohmann::json> summaries) {
    if (summaries.size() < 2) throw UsageError("compare needs at least two summaries");
    std::vector<CompareRow> rows;
    std::string digest;
    for (const nlohmann::json& j : summaries) {
        std::string d;
        CompareRow row;
        try {
            d = j.at("sequence_spec").at("digest").get<std::string>();
            row.structure = j.at("structure").get<std::string>();
            row.average = j.at("averages").at("cmp_total").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("summary is missing fields: ") + e.what());
        }
        if (digest.empty()) digest = d;
        else if (d != digest) throw UsageError("summaries describe different sequences");
        rows.push_back(row);
    }
    for (CompareRow& r : rows) {
        r.ratio = rows.front().average > 0 ? r.average / rows.front().average
                                           : std::numeric_limits<double>::quiet_NaN();
    }
    return rows;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace freshfinger
