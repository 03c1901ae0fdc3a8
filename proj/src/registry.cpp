#include "toolsight/registry.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "toolsight/image_io.hpp"

namespace toolsight {

ResourceId make_resource_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "img_%03d", index);
    return buf;
}

bool is_valid_resource_id(const std::string& id) {
    if (id == "original") return true;
    if (id.size() < 7 || id.rfind("img_", 0) != 0) return false;
    const std::string suffix = id.substr(4);
    if (suffix.size() > 3 && suffix[0] == '0') return false;  // unpadded past 999
    for (char c : suffix)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return suffix != "000";
}

Registry::Registry(Raster original) {
    auto res = std::make_shared<ImageResource>(
        ImageResource{"original", std::move(original), Provenance{"", "", {}, 0}});
    index_["original"] = 0;
    order_.push_back(std::move(res));
}

ResourceId Registry::allocate(Raster raster, Provenance prov) {
    for (const auto& src : prov.source_ids)
        if (!index_.contains(src))
            throw UnknownResourceError("unknown source resource: " + src);
    ResourceId id = make_resource_id(next_index_);
    prov.creation_index = next_index_;
    ++next_index_;
    index_[id] = order_.size();
    order_.push_back(std::make_shared<ImageResource>(
        ImageResource{id, std::move(raster), std::move(prov)}));
    return id;
}

const ImageResource& Registry::get(const ResourceId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownResourceError("unknown resource: " + id);
    return *order_[it->second];
}

std::shared_ptr<const ImageResource> Registry::get_shared(const ResourceId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownResourceError("unknown resource: " + id);
    return order_[it->second];
}

bool Registry::contains(const ResourceId& id) const { return index_.contains(id); }

std::vector<ResourceId> Registry::list_ids() const {
    std::vector<ResourceId> ids;
    ids.reserve(order_.size());
    for (const auto& r : order_) ids.push_back(r->id);
    return ids;
}

void Registry::archive(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& res : order_) {
        write_png(res->raster, (fs::path(dir) / (res->id + ".png")).string());
        entries.push_back({
            {"id", res->id},
            {"provenance",
             {{"tool_name", res->provenance.tool_name},
              {"arguments", res->provenance.arguments},
              {"source_ids", res->provenance.source_ids},
              {"creation_index", res->provenance.creation_index}}},
            {"width", res->raster.width()},
            {"height", res->raster.height()},
            {"content_hash", content_hash(res->raster)},
        });
    }
    std::ofstream f((fs::path(dir) / "registry.json").string());
    if (!f) throw Error("cannot write registry.json under " + dir);
    f << entries.dump(2) << "\n";
}

}  // namespace toolsight
