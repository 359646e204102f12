#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <zlib.h>

#include "transrec/common.hpp"

namespace transrec {

// One raw (user, item, timestamp) action as ingested.
struct Interaction {
    std::string user;
    std::string item;
    std::int64_t timestamp = 0;
};

struct InteractionLog {
    std::vector<Interaction> events;
    std::size_t skipped_lines = 0;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
};

enum class MalformedPolicy { Fail, Skip };

struct LoadOptions {
    char delimiter = '\t';
    bool has_header = false;
    // Column selectors: a decimal string is a 0-based position, anything else
    // is matched against the header row (requires has_header).
    std::string user_column = "0";
    std::string item_column = "1";
    std::string time_column = "2";
    MalformedPolicy on_malformed = MalformedPolicy::Fail;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline bool parse_int64(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Reads the whole file into memory; gzip-compressed input is inflated
// transparently (zlib's gz* layer passes plain files through unchanged).
inline std::string read_file_maybe_gzip(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) throw InputError("cannot open file: " + path);
    std::string content;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) content.append(buf, static_cast<std::size_t>(n));
    if (n < 0) {
        int errnum = 0;
        const char* msg = gzerror(f, &errnum);
        std::string err = msg != nullptr ? msg : "read error";
        gzclose(f);
        throw InputError("failed reading " + path + ": " + err);
    }
    gzclose(f);
    return content;
}

inline int resolve_column(const std::string& selector,
                          const std::vector<std::string_view>& header,
                          bool has_header) {
    std::int64_t idx = 0;
    if (parse_int64(selector, idx)) {
        if (idx < 0) throw InputError("negative column index: " + selector);
        return static_cast<int>(idx);
    }
    if (!has_header)
        throw InputError("column selected by name ('" + selector + "') but input has no header");
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == selector) return static_cast<int>(i);
    throw InputError("column '" + selector + "' not found in header");
}

} // namespace detail

// Parses delimited (user, item, timestamp) lines, in file order.
// Empty lines are ignored; malformed lines either abort with the line number
// or are skipped and counted, per options.
inline InteractionLog load_interactions(const std::string& path, const LoadOptions& opts = {}) {
    const std::string content = detail::read_file_maybe_gzip(path);

    InteractionLog log;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    int ucol = -1, icol = -1, tcol = -1;
    bool columns_resolved = false;

    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        if (!columns_resolved) {
            const auto first_fields = detail::split_fields(line, opts.delimiter);
            const std::vector<std::string_view> header =
                opts.has_header ? first_fields : std::vector<std::string_view>{};
            ucol = detail::resolve_column(opts.user_column, header, opts.has_header);
            icol = detail::resolve_column(opts.item_column, header, opts.has_header);
            tcol = detail::resolve_column(opts.time_column, header, opts.has_header);
            columns_resolved = true;
            if (opts.has_header) continue;
        }

        const auto fields = detail::split_fields(line, opts.delimiter);
        const int needed = std::max(ucol, std::max(icol, tcol));
        std::int64_t ts = 0;
        const bool ok = static_cast<int>(fields.size()) > needed &&
                        !fields[static_cast<std::size_t>(ucol)].empty() &&
                        !fields[static_cast<std::size_t>(icol)].empty() &&
                        detail::parse_int64(fields[static_cast<std::size_t>(tcol)], ts);
        if (!ok) {
            if (opts.on_malformed == MalformedPolicy::Fail)
                throw InputError(path + ":" + std::to_string(line_no) + ": malformed line");
            ++log.skipped_lines;
            continue;
        }
        log.events.push_back(Interaction{
            std::string(fields[static_cast<std::size_t>(ucol)]),
            std::string(fields[static_cast<std::size_t>(icol)]),
            ts});
    }
    return log;
}

struct CoreFilterResult {
    InteractionLog log;
    std::size_t passes = 0; // sweeps that removed something
};

// Discards users and items with fewer than min_count actions. One sweep can
// re-expose violators, so sweeps repeat until a fixed point; the number of
// effective sweeps is reported.
inline CoreFilterResult core_filter(const InteractionLog& log, std::size_t min_count = 5) {
    if (min_count < 1) throw InputError("core_filter: min_count must be >= 1");

    std::vector<const Interaction*> live;
    live.reserve(log.events.size());
    for (const auto& e : log.events) live.push_back(&e);

    std::size_t passes = 0;
    while (true) {
        std::unordered_map<std::string_view, std::size_t> user_count, item_count;
        for (const Interaction* e : live) {
            ++user_count[e->user];
            ++item_count[e->item];
        }
        std::vector<const Interaction*> kept;
        kept.reserve(live.size());
        for (const Interaction* e : live) {
            if (user_count[e->user] >= min_count && item_count[e->item] >= min_count)
                kept.push_back(e);
        }
        if (kept.size() == live.size()) break;
        live = std::move(kept);
        ++passes;
    }

    if (live.empty() && !log.events.empty())
        throw InputError("core_filter: dataset annihilated by filtering (min_count=" +
                         std::to_string(min_count) + ")");

    CoreFilterResult result;
    result.passes = passes;
    result.log.skipped_lines = log.skipped_lines;
    result.log.events.reserve(live.size());
    for (const Interaction* e : live) result.log.events.push_back(*e);
    return result;
}

} // namespace transrec
