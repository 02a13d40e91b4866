#pragma once

#include <map>
#include <string>
#include <vector>

#include "signet/clip.hpp"

namespace signet {

struct ManifestRecord {
    std::string clip_path;
    std::string gloss_label;
    std::string signer_id;
    int64_t frame_count = 0;
    Fps fps;
};

/// Dataset catalog. The label map is the sorted order of distinct gloss
/// labels; class indices run 0..K-1 with no gaps.
struct ClipManifest {
    std::vector<ManifestRecord> records;

    /// Sorted distinct labels.
    std::vector<std::string> labels() const;

    /// gloss -> class index per the sorted label map.
    std::map<std::string, int> label_map() const;

    int num_classes() const;

    /// Class index of a record (throws if the label is somehow absent).
    int class_of(const ManifestRecord& r) const;

    /// Records sorted by clip_path; the on-disk order.
    void sort_by_path();
};

/// Manifest file: UTF-8, one JSON object per line with keys
/// clip_path, gloss_label, signer_id, frame_count, fps_num, fps_den.
void write_manifest(const std::string& path, const ClipManifest& m);
ClipManifest read_manifest(const std::string& path);

}  // namespace signet
