#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "toolsight/raster.hpp"

namespace toolsight {

/// "original" or "img_NNN" (zero-padded to 3 digits, unpadded past 999).
using ResourceId = std::string;

ResourceId make_resource_id(int index);     // index >= 1
bool is_valid_resource_id(const std::string& id);

struct Provenance {
    std::string tool_name;       // empty for "original"
    std::string arguments;       // canonical key-sorted serialization
    std::vector<ResourceId> source_ids;
    int creation_index = 0;      // 0 for "original"
};

struct ImageResource {
    ResourceId id;
    Raster raster;
    Provenance provenance;
};

/// Per-sample append-only store of immutable image resources. The first
/// entry is always "original"; allocation assigns img_001, img_002, ...
/// Entries are handed out as shared_ptr<const> and never replaced.
class Registry {
public:
    explicit Registry(Raster original);

    /// Appends a new resource; all prov.source_ids must already exist.
    /// Returns the assigned id.
    ResourceId allocate(Raster raster, Provenance prov);

    const ImageResource& get(const ResourceId& id) const;  // throws UnknownResourceError
    std::shared_ptr<const ImageResource> get_shared(const ResourceId& id) const;
    bool contains(const ResourceId& id) const;

    /// Ids in creation order, "original" first.
    std::vector<ResourceId> list_ids() const;

    std::size_t size() const { return order_.size(); }

    /// Writes every resource as <dir>/<id>.png plus a registry.json
    /// (id, provenance, width, height, content hash per entry).
    void archive(const std::string& dir) const;

private:
    std::vector<std::shared_ptr<const ImageResource>> order_;
    std::unordered_map<ResourceId, std::size_t> index_;
    int next_index_ = 1;
};

}  // namespace toolsight
