#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "transrec/common.hpp"
#include "transrec/interactions.hpp"

namespace transrec {

// Per-user time-ordered item sequences over dense user/item indices.
//
// With the leave-one-out split applied, positions within each sequence mean:
//   [0 .. n-3] training prefix, [n-2] validation item, [n-1] test item.
// The full sequence (including validation/test) defines the user's item
// membership set used for negative sampling and candidate exclusion.
class SequenceDataset {
public:
    std::vector<std::string> user_ids; // dense user index -> raw id
    std::vector<std::string> item_ids; // dense item index -> raw id
    std::vector<std::vector<std::uint32_t>> sequences;
    std::vector<std::vector<std::uint32_t>> user_items; // sorted unique, full sequence
    bool has_split = false;
    std::size_t users_dropped_in_split = 0;

    std::size_t user_count() const { return sequences.size(); }
    std::size_t item_count() const { return item_ids.size(); }

    std::size_t action_count() const {
        std::size_t n = 0;
        for (const auto& s : sequences) n += s.size();
        return n;
    }

    bool user_has(std::uint32_t u, std::uint32_t item) const {
        const auto& s = user_items[u];
        return std::binary_search(s.begin(), s.end(), item);
    }

    // split accessors; positions per the leave-one-out rule above
    std::size_t train_length(std::uint32_t u) const { return sequences[u].size() - 2; }
    std::uint32_t test_item(std::uint32_t u) const { return sequences[u][sequences[u].size() - 1]; }
    std::uint32_t validation_item(std::uint32_t u) const { return sequences[u][sequences[u].size() - 2]; }
    std::uint32_t test_context(std::uint32_t u) const { return validation_item(u); }
    std::uint32_t validation_context(std::uint32_t u) const { return sequences[u][sequences[u].size() - 3]; }

    // trainable (prev, pos) pairs: every transition whose pos has a
    // predecessor, restricted to the training prefix once split
    std::size_t train_transitions(std::uint32_t u) const {
        const std::size_t n = sequences[u].size();
        if (!has_split) return n >= 2 ? n - 1 : 0;
        return n >= 4 ? n - 3 : 0;
    }

    std::size_t train_transition_count() const {
        std::size_t n = 0;
        for (std::uint32_t u = 0; u < user_count(); ++u) n += train_transitions(u);
        return n;
    }

    void rebuild_user_items() {
        user_items.assign(sequences.size(), {});
        for (std::size_t u = 0; u < sequences.size(); ++u) {
            auto s = sequences[u];
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            user_items[u] = std::move(s);
        }
    }
};

// Builds dense indices (first-appearance order) and per-user sequences sorted
// by timestamp; equal timestamps keep input file order (stable sort).
// Repeated (user, item) actions are kept as distinct events.
inline SequenceDataset build_sequences(const InteractionLog& log) {
    if (log.empty()) throw InputError("build_sequences: empty interaction log");

    SequenceDataset ds;
    std::unordered_map<std::string_view, std::uint32_t> user_index, item_index;

    struct Event {
        std::int64_t timestamp;
        std::uint32_t item;
    };
    std::vector<std::vector<Event>> events;

    for (const auto& e : log.events) {
        auto [uit, unew] = user_index.try_emplace(e.user, static_cast<std::uint32_t>(ds.user_ids.size()));
        if (unew) {
            ds.user_ids.push_back(e.user);
            events.emplace_back();
        }
        auto [iit, inew] = item_index.try_emplace(e.item, static_cast<std::uint32_t>(ds.item_ids.size()));
        if (inew) ds.item_ids.push_back(e.item);
        events[uit->second].push_back(Event{e.timestamp, iit->second});
    }

    ds.sequences.resize(events.size());
    for (std::size_t u = 0; u < events.size(); ++u) {
        auto& ev = events[u];
        std::stable_sort(ev.begin(), ev.end(),
                         [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
        ds.sequences[u].reserve(ev.size());
        for (const auto& e : ev) ds.sequences[u].push_back(e.item);
    }
    ds.rebuild_user_items();
    return ds;
}

// Marks the last item of each sequence as test and the second-to-last as
// validation. Users with fewer than 3 actions cannot supply both held-out
// transitions and are dropped (counted).
inline SequenceDataset split_leave_one_out(const SequenceDataset& ds) {
    SequenceDataset out;
    out.item_ids = ds.item_ids;
    out.has_split = true;
    for (std::size_t u = 0; u < ds.user_count(); ++u) {
        if (ds.sequences[u].size() < 3) {
            ++out.users_dropped_in_split;
            continue;
        }
        out.user_ids.push_back(ds.user_ids[u]);
        out.sequences.push_back(ds.sequences[u]);
    }
    if (out.sequences.empty())
        throw InputError("split_leave_one_out: no user has >= 3 actions");
    out.rebuild_user_items();
    return out;
}

// Dataset manifest, machine-readable key-value text.
inline std::string dataset_manifest(const SequenceDataset& ds) {
    const std::size_t n_users = ds.user_count();
    const std::size_t n_items = ds.item_count();
    const std::size_t n_actions = ds.action_count();
    char buf[64];
    std::ostringstream os;
    os << "users\t" << n_users << "\n";
    os << "items\t" << n_items << "\n";
    os << "actions\t" << n_actions << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", n_users > 0 ? double(n_actions) / double(n_users) : 0.0);
    os << "avg_actions_per_user\t" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", n_items > 0 ? double(n_actions) / double(n_items) : 0.0);
    os << "avg_actions_per_item\t" << buf << "\n";
    if (ds.has_split) os << "users_dropped_in_split\t" << ds.users_dropped_in_split << "\n";
    return os.str();
}

// --- dataset file, versioned plain text -----------------------------------

inline void save_dataset(const std::string& path, const SequenceDataset& ds) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write dataset file: " + path);
    f << "transrec-dataset 1\n";
    f << "users " << ds.user_count() << "\n";
    f << "items " << ds.item_count() << "\n";
    f << "split " << (ds.has_split ? "leave-one-out" : "none") << "\n";
    f << "dropped " << ds.users_dropped_in_split << "\n";
    for (const auto& id : ds.user_ids) f << "user " << id << "\n";
    for (const auto& id : ds.item_ids) f << "item " << id << "\n";
    for (const auto& seq : ds.sequences) {
        f << "seq " << seq.size();
        for (auto i : seq) f << ' ' << i;
        f << "\n";
    }
    f << "end\n";
    if (!f) throw InputError("failed writing dataset file: " + path);
}

inline SequenceDataset load_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "transrec-dataset 1")
        throw InputError(path + ": not a transrec dataset file (bad header)");

    SequenceDataset ds;
    std::size_t n_users = 0, n_items = 0;
    std::string key;
    auto expect_count = [&](const char* name) {
        if (!std::getline(f, line)) throw InputError(path + ": truncated dataset file");
        std::istringstream is(line);
        std::size_t v = 0;
        if (!(is >> key >> v) || key != name)
            throw InputError(path + ": expected '" + name + "' line");
        return v;
    };
    n_users = expect_count("users");
    n_items = expect_count("items");

    if (!std::getline(f, line)) throw InputError(path + ": truncated dataset file");
    {
        std::istringstream is(line);
        std::string mode;
        if (!(is >> key >> mode) || key != "split")
            throw InputError(path + ": expected 'split' line");
        ds.has_split = (mode == "leave-one-out");
    }
    ds.users_dropped_in_split = expect_count("dropped");

    auto read_tagged = [&](const char* tag, std::vector<std::string>& out, std::size_t n) {
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::getline(f, line)) throw InputError(path + ": truncated dataset file");
            const std::string prefix = std::string(tag) + " ";
            if (line.rfind(prefix, 0) != 0)
                throw InputError(path + ": expected '" + tag + "' line");
            out.push_back(line.substr(prefix.size()));
        }
    };
    read_tagged("user", ds.user_ids, n_users);
    read_tagged("item", ds.item_ids, n_items);

    ds.sequences.resize(n_users);
    for (std::size_t u = 0; u < n_users; ++u) {
        if (!std::getline(f, line)) throw InputError(path + ": truncated dataset file");
        std::istringstream is(line);
        std::size_t len = 0;
        if (!(is >> key >> len) || key != "seq")
            throw InputError(path + ": expected 'seq' line");
        ds.sequences[u].resize(len);
        for (std::size_t p = 0; p < len; ++p) {
            std::uint64_t idx = 0;
            if (!(is >> idx) || idx >= n_items)
                throw InputError(path + ": bad item index in sequence");
            ds.sequences[u][p] = static_cast<std::uint32_t>(idx);
        }
    }
    if (!std::getline(f, line) || line != "end")
        throw InputError(path + ": truncated dataset file (missing end marker)");
    ds.rebuild_user_items();
    return ds;
}

} // namespace transrec
