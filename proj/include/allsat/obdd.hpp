#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "allsat/hooks.hpp"
#include "allsat/types.hpp"

namespace allsat {

using NodeId = std::uint32_t;
inline constexpr NodeId kFalseNode = 0;
inline constexpr NodeId kTrueNode = 1;

struct ObddNode {
  Var var = 0;  // 0 for terminals
  NodeId lo = kFalseNode;
  NodeId hi = kFalseNode;
};

// Ordered decision diagram under the identity order x_1 < ... < x_n. Nodes are
// only ever added; no reduction is performed.
class Obdd {
 public:
  explicit Obdd(Var num_vars = 0) : n_(num_vars) { clear(); }

  void clear() {
    nodes_.assign(2, ObddNode{});
    root_ = kFalseNode;
  }

  Var num_vars() const { return n_; }
  NodeId root() const { return root_; }
  void set_root(NodeId r) { root_ = r; }
  bool is_terminal(NodeId id) const { return id <= kTrueNode; }
  const ObddNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t branch_nodes() const { return nodes_.size() - 2; }
  std::size_t memory_estimate() const { return nodes_.capacity() * sizeof(ObddNode); }

  NodeId make_node(Var v, NodeId lo = kFalseNode, NodeId hi = kFalseNode) {
    nodes_.push_back({v, lo, hi});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  // Walks from the root along `prefix` (literals in ascending variable order),
  // creating nodes as needed with FALSE on untaken arcs, and redirects the last
  // arc to `target`. An empty prefix sets the root. Throws InternalError if an
  // arc already leads somewhere other than FALSE or `target`. When `path` is
  // given it receives the node visited at each prefix position.
  void extend(std::span<const Lit> prefix, NodeId target, std::vector<NodeId>* path = nullptr) {
    if (path) path->clear();
    if (prefix.empty()) {
      if (root_ != kFalseNode && root_ != target) throw InternalError("obdd extend: root conflict");
      root_ = target;
      return;
    }
    if (root_ == kFalseNode) root_ = make_node(prefix[0].var());
    NodeId cur = root_;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
      Lit l = prefix[k];
      if (is_terminal(cur) || nodes_[cur].var != l.var())
        throw InternalError("obdd extend: path does not follow the variable order");
      if (path) path->push_back(cur);
      NodeId child = l.negative() ? nodes_[cur].lo : nodes_[cur].hi;
      NodeId next;
      if (k + 1 == prefix.size()) {
        if (child != kFalseNode && child != target)
          throw InternalError("obdd extend: arc already leads elsewhere");
        next = target;
      } else {
        next = child != kFalseNode ? child : make_node(prefix[k + 1].var());
      }
      if (l.negative())
        nodes_[cur].lo = next;
      else
        nodes_[cur].hi = next;
      cur = next;
    }
  }

  // Number of total assignments over x_1..x_n accepted by the diagram.
  BigCount count_models() const { return count_from(root_, 0); }

  // Assignments over x_{above+1}..x_n accepted from `id`.
  BigCount count_from(NodeId id, Var above) const {
    std::vector<BigCount> memo(nodes_.size());
    std::vector<std::uint8_t> done(nodes_.size(), 0);
    return scaled(id, above, memo, done);
  }

  // Paths from `from` (default: the root) to TRUE as cubes in ascending
  // variable order.
  void for_each_path(const CubeSink& sink) const { for_each_path_from(root_, sink); }
  void for_each_path_from(NodeId from, const CubeSink& sink) const {
    std::vector<Lit> path;
    walk(from, path, sink);
  }

  // Text form: header "obdd <branch_nodes> <num_vars>", one "<id> <var> <lo>
  // <hi>" line per branch node (ids 0 and 1 are FALSE and TRUE), then
  // "root <id>".
  void dump(std::ostream& out) const {
    out << "obdd " << branch_nodes() << ' ' << n_ << '\n';
    for (NodeId id = 2; id < nodes_.size(); ++id)
      out << id << ' ' << nodes_[id].var << ' ' << nodes_[id].lo << ' ' << nodes_[id].hi << '\n';
    out << "root " << root_ << '\n';
  }

  static Obdd load(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
      while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
      }
      return false;
    };
    if (!next_line()) throw ParseError(lineno, "missing obdd header");
    std::istringstream hs(line);
    std::string tag;
    std::size_t count = 0;
    Var n = 0;
    if (!(hs >> tag >> count >> n) || tag != "obdd") throw ParseError(lineno, "malformed obdd header");
    Obdd d(n);
    d.nodes_.reserve(count + 2);
    for (std::size_t i = 0; i < count; ++i) {
      if (!next_line()) throw ParseError(lineno, "unexpected end of node list");
      std::istringstream ls(line);
      std::uint64_t id, v, lo, hi;
      if (!(ls >> id >> v >> lo >> hi)) throw ParseError(lineno, "malformed node line");
      if (id != i + 2) throw ParseError(lineno, "node ids must be consecutive from 2");
      if (v < 1 || v > n) throw ParseError(lineno, "variable out of range");
      if (lo >= count + 2 || hi >= count + 2) throw ParseError(lineno, "child id out of range");
      d.nodes_.push_back({static_cast<Var>(v), static_cast<NodeId>(lo), static_cast<NodeId>(hi)});
    }
    if (!next_line()) throw ParseError(lineno, "missing root line");
    std::istringstream rs(line);
    std::uint64_t r;
    if (!(rs >> tag >> r) || tag != "root") throw ParseError(lineno, "malformed root line");
    if (r >= count + 2) throw ParseError(lineno, "root id out of range");
    d.root_ = static_cast<NodeId>(r);
    for (NodeId id = 2; id < d.nodes_.size(); ++id)
      for (NodeId c : {d.nodes_[id].lo, d.nodes_[id].hi})
        if (!d.is_terminal(c) && d.nodes_[c].var <= d.nodes_[id].var)
          throw ParseError(lineno, "node " + std::to_string(id) + " violates the variable order");
    return d;
  }

 private:
  Var var_or_end(NodeId id) const { return is_terminal(id) ? n_ + 1 : nodes_[id].var; }

  // Models over variables after `above` reachable through `id`.
  BigCount scaled(NodeId id, Var above, std::vector<BigCount>& memo,
                  std::vector<std::uint8_t>& done) const {
    if (id == kFalseNode) return 0;
    BigCount gap = pow2(var_or_end(id) - above - 1);
    if (id == kTrueNode) return gap;
    if (!done[id]) {
      Var v = nodes_[id].var;
      memo[id] = scaled(nodes_[id].lo, v, memo, done) + scaled(nodes_[id].hi, v, memo, done);
      done[id] = 1;
    }
    return gap * memo[id];
  }

  void walk(NodeId id, std::vector<Lit>& path, const CubeSink& sink) const {
    if (id == kFalseNode) return;
    if (id == kTrueNode) {
      sink(path);
      return;
    }
    Var v = nodes_[id].var;
    path.push_back(Lit(v, true));
    walk(nodes_[id].lo, path, sink);
    path.back() = Lit(v, false);
    walk(nodes_[id].hi, path, sink);
    path.pop_back();
  }

  Var n_;
  std::vector<ObddNode> nodes_;
  NodeId root_ = kFalseNode;
};

}  // namespace allsat
