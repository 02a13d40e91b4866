#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace signet {

/// One gloss segment of a source video, frame indices inclusive.
struct GlossAnnotation {
    std::string video_id;
    std::string gloss_label;
    int64_t start_frame = 0;
    int64_t end_frame = 0;
    std::string signer_id;
};

/// Parse a UTF-8 JSON annotation document: a top-level array of objects with
/// keys video_id, gloss_label, start_frame, end_frame, signer_id. Order is
/// preserved. Malformed documents raise FormatError with position context;
/// records violating start <= end or an empty label raise ValidationError.
std::vector<GlossAnnotation> parse_annotations(const std::string& text);
std::vector<GlossAnnotation> load_annotations(const std::string& path);

}  // namespace signet
