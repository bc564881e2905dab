#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace haxc {

/// One node of a rooted tree. Parameters are an opaque key-value record at
/// this layer; consumers (frailty trees, d-norm generators, nested stable
/// tail dependence functions) give them meaning.
struct TreeNode {
    std::string id;
    int parent = -1; // -1 for the root
    std::map<std::string, double> params;
    std::vector<int> children;
};

/// Rooted tree with an ordered leaf set mapped to coordinates 1..d.
///
/// Immutable after construction; construction validates that there is
/// exactly one root, that the node set forms a tree, that every internal
/// node has at least one child and that the leaf order is a bijection onto
/// the childless nodes.
class HierarchyTree {
public:
    HierarchyTree(std::vector<TreeNode> nodes, std::vector<std::string> leaf_order);

    static HierarchyTree from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Number of leaves d = model dimension.
    int dimension() const { return static_cast<int>(leaf_index_.size()); }
    int root() const { return root_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    const TreeNode& node(int idx) const { return nodes_.at(static_cast<std::size_t>(idx)); }
    int index_of(const std::string& id) const;

    /// Node index of the leaf mapped to coordinate j (1-based).
    int leaf_node(int coord) const;

    /// Path from the root to the leaf of coordinate j (1-based), as node
    /// indices; first element is the root, last is the leaf.
    std::vector<int> path_nodes(int coord) const;

    /// Same path as node ids.
    std::vector<std::string> path_to_leaf(int coord) const;

    /// Depth of a node (root has depth 0).
    int depth(int idx) const;

    bool is_leaf(int idx) const { return nodes_[static_cast<std::size_t>(idx)].children.empty(); }

    /// For a tree whose leaves all sit at depth 2 (root, sector nodes,
    /// leaves), returns the sector sizes in order of first appearance in the
    /// leaf order. Throws validation_error for any other shape.
    std::vector<int> two_level_sizes() const;

    /// Index of the depth-1 ancestor of coordinate j (two-level trees).
    int sector_node_of(int coord) const;

    /// Deepest internal (non-leaf) ancestor of coordinate j; the leaf's
    /// parent.
    int parent_of_leaf(int coord) const;

    bool structurally_equal(const HierarchyTree& other) const;

private:
    void validate() const;

    std::vector<TreeNode> nodes_;
    std::vector<int> leaf_index_; // coordinate (0-based) -> node index
    int root_ = -1;
};

} // namespace haxc
