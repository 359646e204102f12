#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "transrec/baselines.hpp"
#include "transrec/common.hpp"
#include "transrec/ranking_model.hpp"
#include "transrec/transrec_model.hpp"

namespace transrec {

// Little-endian binary model container, one format for every model kind:
//
//   "TRNSRECM"                  8-byte magic
//   u32 version (= 1)
//   string kind                 (u32 length + bytes)
//   string settings             key=value lines: model settings + provenance
//   u64 n_users, u64 n_items, u32 k
//   u64 n_params, f64 params[n_params]
//   id maps: u64 count + (u32 length + bytes) per string, users then items
//   "ENDMODEL"                  8-byte trailer
struct SavedModel {
    std::string kind;
    std::map<std::string, std::string> settings;
    std::uint64_t n_users = 0;
    std::uint64_t n_items = 0;
    std::uint32_t k = 0;
    std::vector<double> params;
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;
};

namespace detail {

constexpr char kModelMagic[8] = {'T', 'R', 'N', 'S', 'R', 'E', 'C', 'M'};
constexpr char kModelTrailer[8] = {'E', 'N', 'D', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void write_pod(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f, const std::string& path) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw InputError(path + ": truncated or corrupt model file");
    return v;
}

inline void write_string(std::ofstream& f, const std::string& s) {
    write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(s.size()));
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::ifstream& f, const std::string& path) {
    const auto len = read_pod<std::uint32_t>(f, path);
    if (len > (1u << 28)) throw InputError(path + ": corrupt model file (string too long)");
    std::string s(len, '\0');
    f.read(s.data(), len);
    if (!f) throw InputError(path + ": truncated or corrupt model file");
    return s;
}

inline std::string encode_settings(const std::map<std::string, std::string>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

inline std::map<std::string, std::string> decode_settings(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        const std::size_t eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

} // namespace detail

inline void save_model(const std::string& path, const RankingModel& model,
                       const std::vector<std::string>& user_ids,
                       const std::vector<std::string>& item_ids,
                       const std::map<std::string, std::string>& provenance = {}) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write model file: " + path);

    auto settings = model.settings();
    for (const auto& [k, v] : provenance) settings["config." + k] = v;

    f.write(detail::kModelMagic, 8);
    detail::write_pod<std::uint32_t>(f, detail::kModelVersion);
    detail::write_string(f, std::string(model.kind()));
    detail::write_string(f, detail::encode_settings(settings));
    detail::write_pod<std::uint64_t>(f, model.user_count());
    detail::write_pod<std::uint64_t>(f, model.item_count());
    detail::write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(model.dim()));
    const auto& params = model.raw_params();
    detail::write_pod<std::uint64_t>(f, params.size());
    f.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
    detail::write_pod<std::uint64_t>(f, user_ids.size());
    for (const auto& s : user_ids) detail::write_string(f, s);
    detail::write_pod<std::uint64_t>(f, item_ids.size());
    for (const auto& s : item_ids) detail::write_string(f, s);
    f.write(detail::kModelTrailer, 8);
    if (!f) throw InputError("failed writing model file: " + path);
}

inline SavedModel load_saved_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open model file: " + path);

    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, detail::kModelMagic, 8) != 0)
        throw InputError(path + ": not a transrec model file (bad magic)");
    const auto version = detail::read_pod<std::uint32_t>(f, path);
    if (version != detail::kModelVersion)
        throw InputError(path + ": unsupported model file version " + std::to_string(version));

    SavedModel m;
    m.kind = detail::read_string(f, path);
    m.settings = detail::decode_settings(detail::read_string(f, path));
    m.n_users = detail::read_pod<std::uint64_t>(f, path);
    m.n_items = detail::read_pod<std::uint64_t>(f, path);
    m.k = detail::read_pod<std::uint32_t>(f, path);

    const auto n_params = detail::read_pod<std::uint64_t>(f, path);
    if (n_params > (1ull << 33)) throw InputError(path + ": corrupt model file (param count)");
    m.params.resize(n_params);
    f.read(reinterpret_cast<char*>(m.params.data()),
           static_cast<std::streamsize>(n_params * sizeof(double)));
    if (!f) throw InputError(path + ": truncated or corrupt model file");

    const auto n_user_ids = detail::read_pod<std::uint64_t>(f, path);
    m.user_ids.reserve(n_user_ids);
    for (std::uint64_t i = 0; i < n_user_ids; ++i) m.user_ids.push_back(detail::read_string(f, path));
    const auto n_item_ids = detail::read_pod<std::uint64_t>(f, path);
    m.item_ids.reserve(n_item_ids);
    for (std::uint64_t i = 0; i < n_item_ids; ++i) m.item_ids.push_back(detail::read_string(f, path));

    char trailer[8];
    f.read(trailer, 8);
    if (!f || std::memcmp(trailer, detail::kModelTrailer, 8) != 0)
        throw InputError(path + ": truncated or corrupt model file (missing trailer)");
    return m;
}

namespace detail {

inline double settings_double(const SavedModel& m, const std::string& key, double fallback) {
    auto it = m.settings.find(key);
    return it != m.settings.end() ? std::stod(it->second) : fallback;
}

inline std::string settings_string(const SavedModel& m, const std::string& key,
                                   const std::string& fallback) {
    auto it = m.settings.find(key);
    return it != m.settings.end() ? it->second : fallback;
}

} // namespace detail

// Reconstructs a sequential model from its saved form.
inline std::unique_ptr<RankingModel> instantiate_sequential(const SavedModel& m) {
    const std::size_t u = m.n_users, i = m.n_items, k = m.k;
    std::unique_ptr<RankingModel> model;
    if (m.kind == "transrec-l1" || m.kind == "transrec-l2") {
        const Distance d = m.kind == "transrec-l1" ? Distance::L1 : Distance::SquaredL2;
        model = std::make_unique<TransRecModel>(u, i, k, d);
    } else if (m.kind == "poprec") {
        model = std::make_unique<PopRecModel>(u, i);
    } else if (m.kind == "bprmf") {
        model = std::make_unique<BprMfModel>(u, i, k,
                                             detail::settings_string(m, "use_bias", "1") == "1");
    } else if (m.kind == "fmc") {
        model = std::make_unique<FmcModel>(u, i, k);
    } else if (m.kind == "fpmc") {
        model = std::make_unique<FpmcModel>(u, i, k);
    } else if (m.kind == "prme") {
        model = std::make_unique<PrmeModel>(u, i, k, detail::settings_double(m, "alpha", 0.5));
    } else if (m.kind == "hrm-avg") {
        model = std::make_unique<HrmModel>(u, i, k, HrmPooling::Average);
    } else if (m.kind == "hrm-max") {
        model = std::make_unique<HrmModel>(u, i, k, HrmPooling::Max);
    } else {
        throw InputError("unknown sequential model kind: " + m.kind);
    }
    if (model->raw_params().size() != m.params.size())
        throw InputError("model file parameter count does not match kind '" + m.kind +
                         "' with the stored shape");
    model->raw_params() = m.params;
    return model;
}

} // namespace transrec
