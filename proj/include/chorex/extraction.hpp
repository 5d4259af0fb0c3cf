// Choreography extraction: abstract execution spaces (AES), valid symbolic
// execution graphs (SEG), and read-off into choreography programs.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chorex/semantics.hpp"
#include "chorex/syntax.hpp"

namespace chorex {

enum class Mode { Sync, Async };

class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class NotFinite : public Error {
 public:
  using Error::Error;
};

/// No valid SEG exists. `exhausted()` lists (rendered) AES nodes at which
/// every alternative was tried and failed.
class NotExtractable : public Error {
 public:
  explicit NotExtractable(std::vector<std::string> exhausted);
  const std::vector<std::string>& exhausted() const { return exhausted_; }

 private:
  std::vector<std::string> exhausted_;
};

struct AesEdge {
  AbstractLabel label;
  std::size_t target;
};

/// Annotated AES. Nodes are created on discovery and expanded (successors
/// computed) on demand; `expand_all` materialises the whole graph.
class Aes {
 public:
  static constexpr std::size_t kDefaultMaxNodes = 1'000'000;

  Aes(const Network& n, Mode mode, std::size_t max_nodes = kDefaultMaxNodes);

  std::size_t root() const { return 0; }
  Mode mode() const { return mode_; }
  const System& system(std::size_t node) const { return nodes_[node].system; }
  const std::string& key(std::size_t node) const { return nodes_[node].key; }
  bool all_white(std::size_t node) const { return nodes_[node].white; }

  const std::vector<AesEdge>& edges(std::size_t node);
  bool expanded(std::size_t node) const { return nodes_[node].expanded; }
  void expand_all();

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t expanded_count() const { return expanded_count_; }
  std::size_t edge_count() const;

 private:
  struct Node {
    System system;
    std::string key;
    bool white = true;
    bool expanded = false;
    std::vector<AesEdge> edges;
  };

  std::size_t intern(System s);

  Mode mode_;
  std::size_t max_nodes_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t expanded_count_ = 0;
};

/// One choice of the SEG search: a single edge, or the then/else pair of
/// a conditional (then first).
struct Alternative {
  std::vector<std::size_t> edges;  // indices into Aes::edges(node)
};

/// Candidate alternatives at `node`, in search order. Ordered by (least
/// process name involved, kind Com < Sel < multicom < conditional, label);
/// with a seed, the order is shuffled per node, keyed by the node's key.
std::vector<Alternative> alternatives(Aes& aes, std::size_t node, std::optional<std::uint64_t> seed);

/// A SEG, unfolded as a tree with back edges and shared finished subtrees.
struct SegGraph {
  struct Node {
    std::size_t aes_node;
    Alternative choice;                // empty for leaves
    std::vector<std::size_t> children;  // SEG node per chosen edge
    bool loop_target = false;          // entered by an edge that closes a loop
  };
  std::vector<Node> nodes;  // nodes[0] is the root
};

struct SearchStats {
  std::size_t steps = 0;        // alternatives tried
  std::size_t backtracks = 0;   // alternatives rejected
  std::size_t fresh_copies = 0;  // shared subtrees re-explored
};

SegGraph find_valid_seg(Aes& aes, std::optional<std::uint64_t> seed = std::nullopt, SearchStats* stats = nullptr);

/// Loop targets become procedures X1, X2, ... in read-off order; other
/// nodes are read off in place.
ChoreographyProgram seg_to_choreography(Aes& aes, const SegGraph& seg);

struct ExtractionOptions {
  Mode mode = Mode::Sync;
  bool lazy = false;
  std::optional<std::uint64_t> seed;
  std::size_t max_nodes = Aes::kDefaultMaxNodes;
};

struct ExtractionReport {
  ChoreographyProgram program;
  std::size_t aes_nodes = 0;     // nodes created
  std::size_t aes_expanded = 0;  // nodes whose successors were computed
  SearchStats search;
};

ExtractionReport extract_with_report(const Network& n, const ExtractionOptions& options = {});
ChoreographyProgram extract(const Network& n, const ExtractionOptions& options = {});

/// Rewriting-based extraction of finite networks. Without a seed the first
/// enabled action in search order is taken; with one, a random one.
Choreography extract_finite_rewriting(const Network& n, std::optional<std::uint64_t> seed = std::nullopt);

/// Encodes top-level definitions as nested `def` terms, duplicating (and
/// renaming) definitions needed in more than one scope.
Choreography inline_definitions(const ChoreographyProgram& prog);

/// Graphviz rendering. Node labels are truncated at 120 characters, the
/// full text goes in the tooltip.
std::string to_dot(Aes& aes);

}  // namespace chorex
