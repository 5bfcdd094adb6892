#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "openable/core/articulation.hpp"
#include "openable/core/raster.hpp"
#include "openable/ingest/frames.hpp"

namespace openable {

enum class DetectionSource { kGrounding, kOpd };

std::string_view to_string(DetectionSource s);

/// OPD-style joint estimate, expressed in the camera frame.
struct JointHint {
  JointType type = JointType::kPrismatic;
  Vec3 origin_cam = Vec3::Zero();
  Vec3 axis_cam = Vec3::UnitZ();  // not necessarily normalized; may even be zero
  double range = 0.0;
  double confidence = 1.0;
};

struct DetectionRecord {
  std::string frame_id;
  std::string instance_label;
  DetectionSource source = DetectionSource::kGrounding;
  Mask mask;
  std::optional<JointHint> joint_hint;  // present iff source == kOpd
};

/// Row-major run lengths alternating zero/one, starting with a zero run.
std::string encode_rle(const Mask& mask);
/// Throws FormatError (record_index) when the runs do not sum to width * height.
Mask decode_rle(std::string_view rle, int width, int height, int record_index = -1);

std::vector<DetectionRecord> load_detections(const std::filesystem::path& path);
void save_detections(const std::filesystem::path& path, const std::vector<DetectionRecord>& records);

/// Every record must reference a known frame with matching raster size.
/// Throws FormatError naming the record index.
void validate_detections(const std::vector<DetectionRecord>& records,
                         const std::vector<CalibratedFrame>& frames);

}  // namespace openable
