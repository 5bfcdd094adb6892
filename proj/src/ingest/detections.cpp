#include "openable/ingest/detections.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>

#include "openable/core/json_util.hpp"

namespace openable {

std::string_view to_string(DetectionSource s) {
  return s == DetectionSource::kOpd ? "opd" : "grounding";
}

std::string encode_rle(const Mask& mask) {
  std::string out;
  bool current = false;
  std::size_t run = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool on = mask[i] != 0;
    if (on != current) {
      out += std::to_string(run);
      out += ',';
      run = 0;
      current = on;
    }
    ++run;
  }
  out += std::to_string(run);
  return out;
}

Mask decode_rle(std::string_view rle, int width, int height, int record_index) {
  if (width <= 0 || height <= 0) throw FormatError("raster size must be positive", record_index);
  Mask mask(width, height, 0);
  const std::size_t area = mask.size();
  std::size_t pos = 0;
  bool on = false;
  const char* p = rle.data();
  const char* end = rle.data() + rle.size();
  while (p < end) {
    std::uint64_t run = 0;
    auto [next, ec] = std::from_chars(p, end, run);
    if (ec != std::errc() || next == p) {
      throw FormatError("malformed RLE near offset " + std::to_string(p - rle.data()), record_index);
    }
    if (run > area - pos) {
      throw FormatError("RLE runs exceed raster area " + std::to_string(area), record_index);
    }
    if (on) std::fill_n(mask.data().begin() + static_cast<std::ptrdiff_t>(pos), run, std::uint8_t{1});
    pos += run;
    on = !on;
    p = next;
    if (p < end) {
      if (*p != ',') throw FormatError("RLE separator must be ','", record_index);
      ++p;
      if (p == end) throw FormatError("RLE ends with a separator", record_index);
    }
  }
  if (pos != area) {
    throw FormatError("RLE sums to " + std::to_string(pos) + ", raster area is " +
                          std::to_string(area),
                      record_index);
  }
  return mask;
}

namespace {

DetectionRecord parse_record(const Json& r, int index) {
  try {
    DetectionRecord d;
    d.frame_id = r.at("frame_id").get<std::string>();
    d.instance_label = r.value("instance_label", std::string());
    const std::string source = r.at("source").get<std::string>();
    if (source == "grounding") {
      d.source = DetectionSource::kGrounding;
    } else if (source == "opd") {
      d.source = DetectionSource::kOpd;
    } else {
      throw FormatError("unknown source '" + source + "'", index);
    }
    d.mask = decode_rle(r.at("mask_rle").get<std::string>(), r.at("width").get<int>(),
                        r.at("height").get<int>(), index);
    const bool has_hint = r.contains("joint_hint") && !r["joint_hint"].is_null();
    if (has_hint != (d.source == DetectionSource::kOpd)) {
      throw FormatError("joint_hint must be present exactly for opd records", index);
    }
    if (has_hint) {
      const auto& h = r["joint_hint"];
      JointHint hint;
      hint.type = joint_type_from_string(h.at("type").get<std::string>());
      hint.origin_cam = vec3_from_json(h.at("origin_cam"));
      hint.axis_cam = vec3_from_json(h.at("axis_cam"));
      hint.range = h.at("range").get<double>();
      hint.confidence = h.value("confidence", 1.0);
      if (!(hint.confidence >= 0.0 && hint.confidence <= 1.0)) {
        throw FormatError("confidence outside [0, 1]", index);
      }
      d.joint_hint = hint;
    }
    return d;
  } catch (const Json::exception& e) {
    throw FormatError("detection " + std::to_string(index) + ": " + e.what(), index);
  } catch (const InvalidInput& e) {
    throw FormatError("detection " + std::to_string(index) + ": " + e.what(), index);
  }
}

}  // namespace

std::vector<DetectionRecord> load_detections(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("detections") || !doc["detections"].is_array()) {
    throw FormatError(path.string() + ": expected {\"detections\": [...]}");
  }
  std::vector<DetectionRecord> out;
  const auto& arr = doc["detections"];
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_record(arr[i], static_cast<int>(i)));
  return out;
}

void save_detections(const std::filesystem::path& path, const std::vector<DetectionRecord>& records) {
  Json arr = Json::array();
  for (const auto& d : records) {
    Json r{{"frame_id", d.frame_id},
           {"instance_label", d.instance_label},
           {"source", std::string(to_string(d.source))},
           {"width", d.mask.width()},
           {"height", d.mask.height()},
           {"mask_rle", encode_rle(d.mask)}};
    if (d.joint_hint) {
      const auto& h = *d.joint_hint;
      r["joint_hint"] = Json{{"type", std::string(to_string(h.type))},
                             {"origin_cam", to_json(h.origin_cam)},
                             {"axis_cam", to_json(h.axis_cam)},
                             {"range", h.range},
                             {"confidence", h.confidence}};
    }
    arr.push_back(std::move(r));
  }
  write_json_file(path, Json{{"detections", std::move(arr)}});
}

void validate_detections(const std::vector<DetectionRecord>& records,
                         const std::vector<CalibratedFrame>& frames) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& d = records[i];
    const CalibratedFrame* f = find_frame(frames, d.frame_id);
    const int idx = static_cast<int>(i);
    if (!f) throw FormatError("detection " + std::to_string(i) + " references unknown frame " + d.frame_id, idx);
    if (d.mask.width() != f->intrinsics.width || d.mask.height() != f->intrinsics.height) {
      throw FormatError("detection " + std::to_string(i) + " mask size differs from frame " + d.frame_id, idx);
    }
  }
}

}  // namespace openable
