#include "signet/annotations.hpp"

#include <fstream>

#include <json.hpp>

#include "signet/errors.hpp"

namespace signet {

namespace {

std::string field_context(size_t record, const char* field) {
    return "annotation record " + std::to_string(record) + ", field '" + field + "'";
}

std::string require_string(const nlohmann::json& obj, size_t record, const char* field) {
    if (!obj.contains(field)) {
        throw FormatError(field_context(record, field) + ": missing");
    }
    if (!obj[field].is_string()) {
        throw FormatError(field_context(record, field) + ": expected string");
    }
    return obj[field].get<std::string>();
}

int64_t require_frame(const nlohmann::json& obj, size_t record, const char* field) {
    if (!obj.contains(field)) {
        throw FormatError(field_context(record, field) + ": missing");
    }
    if (!obj[field].is_number_integer() && !obj[field].is_number_unsigned()) {
        throw FormatError(field_context(record, field) + ": expected integer");
    }
    const int64_t v = obj[field].get<int64_t>();
    if (v < 0) {
        throw ValidationError(field_context(record, field) + ": negative frame index " +
                              std::to_string(v));
    }
    return v;
}

}  // namespace

std::vector<GlossAnnotation> parse_annotations(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("annotation parse error: ") + e.what());
    }
    if (!doc.is_array()) {
        throw FormatError("annotation document must be a top-level array");
    }

    std::vector<GlossAnnotation> out;
    out.reserve(doc.size());
    for (size_t i = 0; i < doc.size(); ++i) {
        const auto& obj = doc[i];
        if (!obj.is_object()) {
            throw FormatError("annotation record " + std::to_string(i) + ": expected object");
        }
        GlossAnnotation a;
        a.video_id = require_string(obj, i, "video_id");
        a.gloss_label = require_string(obj, i, "gloss_label");
        a.start_frame = require_frame(obj, i, "start_frame");
        a.end_frame = require_frame(obj, i, "end_frame");
        a.signer_id = require_string(obj, i, "signer_id");
        if (a.gloss_label.empty()) {
            throw ValidationError(field_context(i, "gloss_label") + ": empty label");
        }
        if (a.start_frame > a.end_frame) {
            throw ValidationError(field_context(i, "start_frame") + ": start " +
                                  std::to_string(a.start_frame) + " > end " +
                                  std::to_string(a.end_frame));
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<GlossAnnotation> load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_annotations(text);
}

}  // namespace signet
