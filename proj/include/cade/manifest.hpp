#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cade/image.hpp"

namespace cade {

enum class SampleTier { Image, HQFrame, MQFrame, LQFrame };
enum class Split { Train, Validation, Test };

const char* to_string(SampleTier tier);
const char* to_string(Split split);
SampleTier tier_from_string(const std::string& s);
Split split_from_string(const std::string& s);

struct CropRect {
    int x = 0, y = 0, w = 0, h = 0;
    bool operator==(const CropRect&) const = default;
};

// Pointer to one expert's pair of delineation mask files.
struct DelineationRef {
    std::string expert_id;
    std::string ll_path;
    std::string hl_path;
    bool operator==(const DelineationRef&) const = default;
};

struct SampleRecord {
    std::string id;
    std::string patient_id;
    int label = 0;  // 0 = NDBE, 1 = neoplasia
    SampleTier tier = SampleTier::Image;
    std::string image_path;
    std::optional<CropRect> crop;
    std::vector<DelineationRef> delineations;

    bool has_gt() const { return delineations.size() >= 2; }
    bool operator==(const SampleRecord&) const = default;
};

struct DatasetManifest {
    std::string name;
    Split split = Split::Train;
    std::vector<SampleRecord> records;

    const SampleRecord* find(const std::string& id) const;
    bool operator==(const DatasetManifest&) const = default;
};

// Line-delimited JSON: a header object followed by one record per line.
// Referenced image paths are recorded, not opened.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Resolves a path stored in a manifest relative to the manifest's directory.
std::filesystem::path resolve_manifest_path(const std::filesystem::path& manifest_path,
                                            const std::string& stored);

// Loads a record's image, honouring the optional crop rectangle.
RgbImage load_sample_image(const SampleRecord& record,
                           const std::filesystem::path& manifest_path);

struct SplitViolation {
    std::string patient_id;
    std::vector<std::string> manifests;  // names of the manifests sharing the patient
};

// Reports every patient id appearing in more than one of {train, val, tests}.
// Overlap between two test manifests is permitted.
std::vector<SplitViolation> validate_patient_split(const DatasetManifest& train,
                                                   const DatasetManifest& val,
                                                   std::span<const DatasetManifest> tests);

}  // namespace cade
