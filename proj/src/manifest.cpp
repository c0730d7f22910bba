#include "cade/manifest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cade/error.hpp"
#include "cade/image_io.hpp"

using nlohmann::json;

namespace cade {

const char* to_string(SampleTier tier) {
    switch (tier) {
        case SampleTier::Image: return "Image";
        case SampleTier::HQFrame: return "HQFrame";
        case SampleTier::MQFrame: return "MQFrame";
        case SampleTier::LQFrame: return "LQFrame";
    }
    return "?";
}

const char* to_string(Split split) {
    switch (split) {
        case Split::Train: return "Train";
        case Split::Validation: return "Validation";
        case Split::Test: return "Test";
    }
    return "?";
}

SampleTier tier_from_string(const std::string& s) {
    if (s == "Image") return SampleTier::Image;
    if (s == "HQFrame") return SampleTier::HQFrame;
    if (s == "MQFrame") return SampleTier::MQFrame;
    if (s == "LQFrame") return SampleTier::LQFrame;
    throw ValidationError("unknown tier '" + s + "'");
}

Split split_from_string(const std::string& s) {
    if (s == "Train") return Split::Train;
    if (s == "Validation") return Split::Validation;
    if (s == "Test") return Split::Test;
    throw ValidationError("unknown split '" + s + "'");
}

const SampleRecord* DatasetManifest::find(const std::string& id) const {
    for (const auto& r : records)
        if (r.id == id) return &r;
    return nullptr;
}

namespace {

[[noreturn]] void fail_at(const std::filesystem::path& path, int line, const std::string& what) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + what);
}

SampleRecord parse_record(const json& j, const std::filesystem::path& path, int line) {
    SampleRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        r.patient_id = j.at("patient_id").get<std::string>();
        r.label = j.at("label").get<int>();
        r.tier = tier_from_string(j.at("tier").get<std::string>());
        r.image_path = j.at("image_path").get<std::string>();
        if (j.contains("crop")) {
            const auto& c = j.at("crop");
            if (!c.is_array() || c.size() != 4) fail_at(path, line, "field 'crop' must be [x,y,w,h]");
            r.crop = CropRect{c[0].get<int>(), c[1].get<int>(), c[2].get<int>(), c[3].get<int>()};
        }
        if (j.contains("delineations")) {
            for (const auto& d : j.at("delineations")) {
                DelineationRef ref;
                ref.expert_id = d.at("expert_id").get<std::string>();
                ref.ll_path = d.at("ll_path").get<std::string>();
                ref.hl_path = d.at("hl_path").get<std::string>();
                r.delineations.push_back(std::move(ref));
            }
        }
    } catch (const json::exception& e) {
        fail_at(path, line, std::string("record field error: ") + e.what());
    } catch (const ValidationError& e) {
        fail_at(path, line, e.what());
    }
    if (r.label != 0 && r.label != 1) fail_at(path, line, "label must be 0 or 1");
    return r;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());

    DatasetManifest m;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty manifest");
    ++line_no;
    json header;
    try {
        header = json::parse(line);
        m.name = header.at("name").get<std::string>();
        m.split = split_from_string(header.at("split").get<std::string>());
        if (header.at("version").get<int>() != 1)
            fail_at(path, line_no, "unsupported manifest version");
    } catch (const json::exception& e) {
        fail_at(path, line_no, std::string("header error: ") + e.what());
    }

    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail_at(path, line_no, std::string("parse error: ") + e.what());
        }
        SampleRecord r = parse_record(j, path, line_no);
        if (!seen.insert(r.id).second)
            fail_at(path, line_no, "duplicate id '" + r.id + "'");
        m.records.push_back(std::move(r));
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    json header = {{"name", manifest.name}, {"split", to_string(manifest.split)}, {"version", 1}};
    out << header.dump() << "\n";
    for (const auto& r : manifest.records) {
        json j = {{"id", r.id},
                  {"patient_id", r.patient_id},
                  {"label", r.label},
                  {"tier", to_string(r.tier)},
                  {"image_path", r.image_path}};
        if (r.crop) j["crop"] = {r.crop->x, r.crop->y, r.crop->w, r.crop->h};
        if (!r.delineations.empty()) {
            json ds = json::array();
            for (const auto& d : r.delineations)
                ds.push_back({{"expert_id", d.expert_id}, {"ll_path", d.ll_path}, {"hl_path", d.hl_path}});
            j["delineations"] = ds;
        }
        out << j.dump() << "\n";
    }
}

std::filesystem::path resolve_manifest_path(const std::filesystem::path& manifest_path,
                                            const std::string& stored) {
    std::filesystem::path p(stored);
    if (p.is_absolute()) return p;
    return manifest_path.parent_path() / p;
}

RgbImage load_sample_image(const SampleRecord& record,
                           const std::filesystem::path& manifest_path) {
    RgbImage img = read_rgb_png(resolve_manifest_path(manifest_path, record.image_path));
    if (!record.crop) return img;
    const CropRect& c = *record.crop;
    if (c.x < 0 || c.y < 0 || c.w <= 0 || c.h <= 0 ||
        c.x + c.w > img.width || c.y + c.h > img.height)
        throw ValidationError("crop rectangle for '" + record.id + "' exceeds image bounds");
    RgbImage out;
    out.width = c.w;
    out.height = c.h;
    out.pixels.resize(static_cast<std::size_t>(c.w) * c.h * 3);
    for (int y = 0; y < c.h; ++y)
        for (int x = 0; x < c.w; ++x)
            for (int ch = 0; ch < 3; ++ch)
                out.at(x, y, ch) = img.at(c.x + x, c.y + y, ch);
    return out;
}

std::vector<SplitViolation> validate_patient_split(const DatasetManifest& train,
                                                   const DatasetManifest& val,
                                                   std::span<const DatasetManifest> tests) {
    // Patient -> manifests, with all test manifests counting as one split group.
    std::map<std::string, std::set<std::string>> groups;   // patient -> split groups
    std::map<std::string, std::set<std::string>> sources;  // patient -> manifest names
    auto collect = [&](const DatasetManifest& m, const std::string& group) {
        for (const auto& r : m.records) {
            groups[r.patient_id].insert(group);
            sources[r.patient_id].insert(m.name);
        }
    };
    collect(train, "train:" + train.name);
    collect(val, "val:" + val.name);
    for (const auto& t : tests) collect(t, "test");

    std::vector<SplitViolation> violations;
    for (const auto& [patient, gs] : groups) {
        if (gs.size() <= 1) continue;
        SplitViolation v;
        v.patient_id = patient;
        v.manifests.assign(sources[patient].begin(), sources[patient].end());
        violations.push_back(std::move(v));
    }
    return violations;
}

}  // namespace cade
