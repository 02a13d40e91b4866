#include "signet/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "signet/errors.hpp"

namespace signet {

std::vector<std::string> ClipManifest::labels() const {
    std::set<std::string> s;
    for (const auto& r : records) s.insert(r.gloss_label);
    return {s.begin(), s.end()};
}

std::map<std::string, int> ClipManifest::label_map() const {
    std::map<std::string, int> m;
    int idx = 0;
    for (const auto& l : labels()) m[l] = idx++;
    return m;
}

int ClipManifest::num_classes() const { return static_cast<int>(labels().size()); }

int ClipManifest::class_of(const ManifestRecord& r) const {
    const auto m = label_map();
    const auto it = m.find(r.gloss_label);
    if (it == m.end()) throw ValidationError("label not in map: " + r.gloss_label);
    return it->second;
}

void ClipManifest::sort_by_path() {
    std::sort(records.begin(), records.end(),
              [](const ManifestRecord& a, const ManifestRecord& b) {
                  return a.clip_path < b.clip_path;
              });
}

void write_manifest(const std::string& path, const ClipManifest& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot open for write: " + path);
    for (const auto& r : m.records) {
        nlohmann::ordered_json j;
        j["clip_path"] = r.clip_path;
        j["gloss_label"] = r.gloss_label;
        j["signer_id"] = r.signer_id;
        j["frame_count"] = r.frame_count;
        j["fps_num"] = r.fps.num;
        j["fps_den"] = r.fps.den;
        out << j.dump() << "\n";
    }
    if (!out) throw RuntimeFailure("write failed: " + path);
}

ClipManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact(path);
    ClipManifest m;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ManifestRecord r;
        try {
            r.clip_path = j.at("clip_path").get<std::string>();
            r.gloss_label = j.at("gloss_label").get<std::string>();
            r.signer_id = j.at("signer_id").get<std::string>();
            r.frame_count = j.at("frame_count").get<int64_t>();
            r.fps.num = j.at("fps_num").get<uint32_t>();
            r.fps.den = j.at("fps_den").get<uint32_t>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        m.records.push_back(std::move(r));
    }
    return m;
}

}  // namespace signet
