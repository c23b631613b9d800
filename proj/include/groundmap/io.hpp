#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundmap/correct_gd.hpp"
#include "groundmap/correct_regression.hpp"
#include "groundmap/evaluate.hpp"
#include "groundmap/perturb.hpp"
#include "groundmap/simulator.hpp"

namespace groundmap {

using json = nlohmann::json;

// Quads are arrays of 4 [x, y] pairs; homographies row-major 9-arrays.
json to_json(const PixelQuad& q);
json to_json(const GroundQuad& q);
PixelQuad pixel_quad_from_json(const json& j);
GroundQuad ground_quad_from_json(const json& j);

json to_json(const Homography& H);
Homography homography_from_json(const json& j);

json to_json(const CameraModel& cam);
CameraModel camera_from_json(const json& j);

json to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const json& j);

json to_json(const Scene& scene);
Scene scene_from_json(const json& j);

json to_json(const PerturbationSpec& spec);
PerturbationSpec perturbation_spec_from_json(const json& j);

json to_json(const TrapezoidVariant& v);
TrapezoidVariant variant_from_json(const json& j);

json to_json(const ErrorModel& m);
ErrorModel error_model_from_json(const json& j);

json to_json(const GdConfig& cfg);
GdConfig gd_config_from_json(const json& j);

json to_json(const AggregateStats& stats);
json to_json(const Heatmap& hm);

/// Fixed 12-column record schema:
/// variant_id,method,calib_ids,calib_sum,calib_spread,baseline_path_err,
/// corrected_path_err,baseline_calib_err,corrected_calib_err,
/// path_improvement,calib_improvement,flag
/// calib_ids joins the three indices with '-'.
extern const char* const kRecordCsvHeader;

std::string record_to_csv(const EvaluationRecord& rec);
EvaluationRecord record_from_csv(const std::string& line);

void write_records_csv(std::ostream& os, const std::vector<EvaluationRecord>& records);
std::vector<EvaluationRecord> read_records_csv(std::istream& is);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double x);

// JSON-lines streams: one variant / trace entry per line.
void write_variants_jsonl(std::ostream& os, const std::vector<TrapezoidVariant>& variants);
std::vector<TrapezoidVariant> read_variants_jsonl(std::istream& is);

void write_trace_jsonl(std::ostream& os, const std::vector<TraceEntry>& trace);

// File helpers.
json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);
void save_text_file(const std::string& path, const std::string& text);

} // namespace groundmap
