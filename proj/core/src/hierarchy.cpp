#include "haxc/hierarchy.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "haxc/errors.hpp"

namespace haxc {

using detail::require;

HierarchyTree::HierarchyTree(std::vector<TreeNode> nodes, std::vector<std::string> leaf_order)
    : nodes_(std::move(nodes)) {
    require(!nodes_.empty(), "hierarchy: empty node list");

    std::unordered_map<std::string, int> by_id;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        require(!n.id.empty(), "hierarchy: node with empty id");
        require(by_id.emplace(n.id, i).second, "hierarchy: duplicate node id '" + n.id + "'");
    }

    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        auto& n = nodes_[static_cast<std::size_t>(i)];
        n.children.clear();
    }
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        if (n.parent < 0) {
            require(root_ < 0, "hierarchy: more than one root");
            root_ = i;
        } else {
            require(n.parent < static_cast<int>(nodes_.size()),
                    "hierarchy: parent index out of range for node '" + n.id + "'");
            nodes_[static_cast<std::size_t>(n.parent)].children.push_back(i);
        }
    }
    require(root_ >= 0, "hierarchy: no root node");

    leaf_index_.reserve(leaf_order.size());
    std::unordered_set<std::string> seen;
    for (const auto& id : leaf_order) {
        auto it = by_id.find(id);
        require(it != by_id.end(), "hierarchy: leaf_order references unknown node '" + id + "'");
        require(seen.insert(id).second, "hierarchy: leaf '" + id + "' listed twice");
        leaf_index_.push_back(it->second);
    }

    validate();
}

void HierarchyTree::validate() const {
    // Reachability from the root doubles as the cycle check: a parent map
    // over n nodes with one root and all nodes reachable is a tree.
    std::vector<char> reached(nodes_.size(), 0);
    std::vector<int> stack{root_};
    std::size_t count = 0;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        if (reached[static_cast<std::size_t>(i)]) continue;
        reached[static_cast<std::size_t>(i)] = 1;
        ++count;
        for (int c : nodes_[static_cast<std::size_t>(i)].children) stack.push_back(c);
    }
    require(count == nodes_.size(), "hierarchy: not all nodes reachable from the root (cycle or orphan)");

    std::unordered_set<int> leaf_set(leaf_index_.begin(), leaf_index_.end());
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        if (n.children.empty()) {
            require(leaf_set.count(i) == 1,
                    "hierarchy: childless node '" + n.id + "' missing from leaf_order");
        } else {
            require(leaf_set.count(i) == 0,
                    "hierarchy: leaf_order lists internal node '" + n.id + "'");
        }
    }
    require(!leaf_index_.empty(), "hierarchy: tree has no leaves");
}

int HierarchyTree::index_of(const std::string& id) const {
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
        if (nodes_[static_cast<std::size_t>(i)].id == id) return i;
    throw validation_error("hierarchy: unknown node id '" + id + "'");
}

int HierarchyTree::leaf_node(int coord) const {
    require(coord >= 1 && coord <= dimension(),
            "hierarchy: coordinate index " + std::to_string(coord) + " out of range 1.." +
                std::to_string(dimension()));
    return leaf_index_[static_cast<std::size_t>(coord - 1)];
}

std::vector<int> HierarchyTree::path_nodes(int coord) const {
    std::vector<int> rev;
    for (int i = leaf_node(coord); i >= 0; i = nodes_[static_cast<std::size_t>(i)].parent)
        rev.push_back(i);
    std::reverse(rev.begin(), rev.end());
    return rev;
}

std::vector<std::string> HierarchyTree::path_to_leaf(int coord) const {
    std::vector<std::string> ids;
    for (int i : path_nodes(coord)) ids.push_back(nodes_[static_cast<std::size_t>(i)].id);
    return ids;
}

int HierarchyTree::depth(int idx) const {
    int d = 0;
    for (int i = idx; nodes_[static_cast<std::size_t>(i)].parent >= 0;
         i = nodes_[static_cast<std::size_t>(i)].parent)
        ++d;
    return d;
}

std::vector<int> HierarchyTree::two_level_sizes() const {
    std::vector<int> sector_order;        // node indices, by first appearance
    std::vector<int> sizes;
    for (int j = 1; j <= dimension(); ++j) {
        auto path = path_nodes(j);
        require(path.size() == 3,
                "hierarchy: not a two-level tree (leaf " + std::to_string(j) +
                    " at depth " + std::to_string(path.size() - 1) + ")");
        int sector = path[1];
        auto it = std::find(sector_order.begin(), sector_order.end(), sector);
        if (it == sector_order.end()) {
            sector_order.push_back(sector);
            sizes.push_back(1);
        } else {
            sizes[static_cast<std::size_t>(it - sector_order.begin())] += 1;
        }
    }
    return sizes;
}

int HierarchyTree::sector_node_of(int coord) const {
    auto path = path_nodes(coord);
    require(path.size() >= 2, "hierarchy: coordinate " + std::to_string(coord) + " is the root");
    return path[1];
}

int HierarchyTree::parent_of_leaf(int coord) const {
    int leaf = leaf_node(coord);
    int p = nodes_[static_cast<std::size_t>(leaf)].parent;
    return p < 0 ? leaf : p;
}

bool HierarchyTree::structurally_equal(const HierarchyTree& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    if (leaf_index_.size() != other.leaf_index_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = other.nodes_[i];
        if (a.id != b.id || a.params != b.params) return false;
        const std::string ap = a.parent < 0 ? "" : nodes_[static_cast<std::size_t>(a.parent)].id;
        const std::string bp = b.parent < 0 ? "" : other.nodes_[static_cast<std::size_t>(b.parent)].id;
        if (ap != bp) return false;
    }
    for (std::size_t j = 0; j < leaf_index_.size(); ++j) {
        if (nodes_[static_cast<std::size_t>(leaf_index_[j])].id !=
            other.nodes_[static_cast<std::size_t>(other.leaf_index_[j])].id)
            return false;
    }
    return true;
}

namespace {

std::string id_from_json(const nlohmann::json& j, const char* what) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw validation_error(std::string("hierarchy: ") + what + " must be a string or integer");
}

} // namespace

HierarchyTree HierarchyTree::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("nodes") && j.contains("leaf_order"),
            "hierarchy: expected object with 'nodes' and 'leaf_order'");

    std::vector<TreeNode> nodes;
    std::unordered_map<std::string, int> by_id;
    for (const auto& nj : j.at("nodes")) {
        TreeNode n;
        n.id = id_from_json(nj.at("id"), "node id");
        if (nj.contains("params")) {
            for (auto it = nj.at("params").begin(); it != nj.at("params").end(); ++it) {
                require(it.value().is_number(), "hierarchy: param '" + it.key() + "' of node '" +
                                                    n.id + "' must be numeric");
                n.params[it.key()] = it.value().get<double>();
            }
        }
        by_id.emplace(n.id, static_cast<int>(nodes.size()));
        nodes.push_back(std::move(n));
    }
    int i = 0;
    for (const auto& nj : j.at("nodes")) {
        const auto& pj = nj.contains("parent") ? nj.at("parent") : nlohmann::json();
        if (!pj.is_null()) {
            auto pid = id_from_json(pj, "parent id");
            auto it = by_id.find(pid);
            require(it != by_id.end(), "hierarchy: unknown parent '" + pid + "'");
            nodes[static_cast<std::size_t>(i)].parent = it->second;
        }
        ++i;
    }

    std::vector<std::string> leaf_order;
    for (const auto& lj : j.at("leaf_order")) leaf_order.push_back(id_from_json(lj, "leaf id"));

    return HierarchyTree(std::move(nodes), std::move(leaf_order));
}

nlohmann::json HierarchyTree::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nlohmann::json nj;
        nj["id"] = n.id;
        if (n.parent < 0)
            nj["parent"] = nullptr;
        else
            nj["parent"] = nodes_[static_cast<std::size_t>(n.parent)].id;
        nj["params"] = nlohmann::json::object();
        for (const auto& [k, v] : n.params) nj["params"][k] = v;
        nodes.push_back(std::move(nj));
    }
    nlohmann::json leaf_order = nlohmann::json::array();
    for (int idx : leaf_index_) leaf_order.push_back(nodes_[static_cast<std::size_t>(idx)].id);
    return nlohmann::json{{"nodes", std::move(nodes)}, {"leaf_order", std::move(leaf_order)}};
}

} // namespace haxc
