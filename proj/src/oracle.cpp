#include "smt_analogy/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace smt_analogy {

bool signatures_compatible(const SmtNode& base, const SmtNode& target, const OracleOptions& options) {
  if (base.kind != target.kind) return false;
  if (base.kind == NodeKind::Relation) return base.signature == target.signature;
  if (!options.strict_synonyms) return true;
  if (options.vocab == nullptr) return base.signature == target.signature;
  return options.vocab->same_group(base.signature, target.signature);
}

RuleReport verify_alignment(const SmtDag& base, const SmtDag& target, const BinaryAlignment& x,
                            const OracleOptions& options) {
  if (x.rows() != base.size() || x.cols() != target.size())
    throw std::invalid_argument("verify_alignment: alignment is " + std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + ", instance is " + std::to_string(base.size()) + "x" +
                                std::to_string(target.size()));
  RuleReport report;
  const auto heights = node_heights(target);

  for (Eigen::Index b = 0; b < x.rows(); ++b)
    if (x.row(b).sum() > 1) report.base_violations.push_back(static_cast<NodeId>(b));
  for (Eigen::Index t = 0; t < x.cols(); ++t)
    if (x.col(t).sum() > 1) report.target_violations.push_back(static_cast<NodeId>(t));
  report.one_to_one = report.base_violations.empty() && report.target_violations.empty();

  for (const auto& [u, t] : to_pairs(x)) {
    ++report.correspondence_count;
    report.systematicity_score += 1.0 + heights[static_cast<std::size_t>(t)];
    if (!signatures_compatible(base.node(u), target.node(t), options))
      report.identicality_violations.emplace_back(u, t);
    for (const auto& c : base.children(u)) {
      const auto partner = target.child_at(t, c.pos);
      if (!partner || x(c.node, *partner) == 0) {
        report.connectivity_violations.emplace_back(u, t);
        break;
      }
    }
  }
  report.parallel_connectivity = report.connectivity_violations.empty();
  report.tiered_identicality = report.identicality_violations.empty();
  return report;
}

double systematicity_score(const SmtDag& target, const std::vector<Correspondence>& mapping) {
  const auto heights = node_heights(target);
  double score = 0.0;
  for (const auto& [b, t] : mapping) {
    (void)b;
    score += 1.0 + heights.at(static_cast<std::size_t>(t));
  }
  return score;
}

bool can_extend(const SmtDag& base, const SmtDag& target, const Mapping& mapping, const OracleOptions& options) {
  std::vector<NodeId> image(static_cast<std::size_t>(base.size()), -1);
  std::vector<char> used(static_cast<std::size_t>(target.size()), 0);
  for (const auto& [b, t] : mapping) {
    image[static_cast<std::size_t>(b)] = t;
    used[static_cast<std::size_t>(t)] = 1;
  }
  for (NodeId u = 0; u < base.size(); ++u) {
    if (image[static_cast<std::size_t>(u)] >= 0) continue;
    for (NodeId t = 0; t < target.size(); ++t) {
      if (used[static_cast<std::size_t>(t)] || !signatures_compatible(base.node(u), target.node(t), options)) continue;
      bool ok = true;
      for (const auto& c : base.children(u)) {
        const auto partner = target.child_at(t, c.pos);
        if (!partner || image[static_cast<std::size_t>(c.node)] != *partner) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
  }
  return false;
}

namespace {

/// Depth-first search over base nodes in id order. Each node is either
/// mapped (targets tried in ascending order) or skipped, in that order, so
/// complete mappings of equal size are visited in lexicographic order.
/// Mapping a node forces its arguments onto the matching argument slots of
/// the target node; skipping a node forbids mapping any of its parents.
class StructureSearch {
 public:
  StructureSearch(const SmtDag& base, const SmtDag& target, const OracleOptions& options)
      : base_(base), target_(target), options_(options) {
    const auto heights = node_heights(target);
    gain_.resize(heights.size());
    for (std::size_t t = 0; t < heights.size(); ++t) gain_[t] = 1 + heights[t];
    const auto nb = static_cast<std::size_t>(base.size());
    const auto nt = static_cast<std::size_t>(target.size());
    compatible_.assign(nb, std::vector<char>(nt, 0));
    best_gain_.assign(nb, 0);
    for (NodeId u = 0; u < base.size(); ++u)
      for (NodeId t = 0; t < target.size(); ++t)
        if (signatures_compatible(base.node(u), target.node(t), options) &&
            base.arity(u) <= target.arity(t)) {
          compatible_[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)] = 1;
          best_gain_[static_cast<std::size_t>(u)] =
              std::max(best_gain_[static_cast<std::size_t>(u)], gain_[static_cast<std::size_t>(t)]);
        }
    image_.assign(nb, -1);
    forced_.assign(nb, -1);
    forbid_.assign(nb, 0);
    owner_.assign(nt, -1);
  }

  Mapping best() {
    mode_ = Mode::Best;
    dfs(0);
    return best_mapping_;
  }

  void enumerate(int max_mappings, std::int64_t max_steps) {
    mode_ = Mode::Enumerate;
    max_mappings_ = max_mappings;
    max_steps_ = max_steps;
    dfs(0);
  }

  int best_count() const { return best_count_; }
  long best_score() const { return best_score_; }
  std::vector<Mapping>& maximal() { return maximal_; }
  bool truncated() const { return truncated_; }

 private:
  enum class Mode { Best, Enumerate };

  struct TrailEntry {
    enum class Kind { Forced, Owner, Forbid } kind;
    int index;
    int previous;
  };

  std::size_t mark() const { return trail_.size(); }

  void undo(std::size_t to) {
    while (trail_.size() > to) {
      const auto e = trail_.back();
      trail_.pop_back();
      switch (e.kind) {
        case TrailEntry::Kind::Forced:
          forced_[static_cast<std::size_t>(e.index)] = e.previous;
          break;
        case TrailEntry::Kind::Owner:
          owner_[static_cast<std::size_t>(e.index)] = e.previous;
          break;
        case TrailEntry::Kind::Forbid:
          forbid_[static_cast<std::size_t>(e.index)] = e.previous;
          break;
      }
    }
  }

  void set_forced(NodeId u, NodeId t) {
    trail_.push_back({TrailEntry::Kind::Forced, u, forced_[static_cast<std::size_t>(u)]});
    forced_[static_cast<std::size_t>(u)] = t;
  }
  void set_owner(NodeId t, NodeId u) {
    trail_.push_back({TrailEntry::Kind::Owner, t, owner_[static_cast<std::size_t>(t)]});
    owner_[static_cast<std::size_t>(t)] = u;
  }
  void add_forbid(NodeId u) {
    trail_.push_back({TrailEntry::Kind::Forbid, u, forbid_[static_cast<std::size_t>(u)]});
    ++forbid_[static_cast<std::size_t>(u)];
  }

  bool decided(NodeId u) const { return u < cursor_; }

  // Maps u to t and propagates the argument slots. Returns false on conflict.
  bool map(NodeId u, NodeId t) {
    const NodeId holder = owner_[static_cast<std::size_t>(t)];
    if (holder != -1 && holder != u) return false;
    if (forbid_[static_cast<std::size_t>(u)] > 0) return false;
    if (!compatible_[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)]) return false;
    if (holder == -1) set_owner(t, u);
    for (const auto& c : base_.children(u)) {
      const auto slot = target_.child_at(t, c.pos);
      if (!slot) return false;
      const NodeId tc = *slot;
      if (decided(c.node)) {
        if (image_[static_cast<std::size_t>(c.node)] != tc) return false;
        continue;
      }
      const NodeId f = forced_[static_cast<std::size_t>(c.node)];
      if (f >= 0) {
        if (f != tc) return false;
        continue;
      }
      const NodeId child_holder = owner_[static_cast<std::size_t>(tc)];
      if (child_holder != -1 && child_holder != c.node) return false;
      if (forbid_[static_cast<std::size_t>(c.node)] > 0) return false;
      if (!compatible_[static_cast<std::size_t>(c.node)][static_cast<std::size_t>(tc)]) return false;
      set_forced(c.node, tc);
      if (child_holder == -1) set_owner(tc, c.node);
    }
    image_[static_cast<std::size_t>(u)] = t;
    return true;
  }

  void skip(NodeId u) {
    image_[static_cast<std::size_t>(u)] = -1;
    for (NodeId p : base_.parents(u))
      if (!decided(p)) add_forbid(p);
  }

  bool dominated() const {
    if (!found_) return false;
    int count = count_;
    long score = score_;
    for (NodeId u = cursor_; u < base_.size(); ++u) {
      if (forbid_[static_cast<std::size_t>(u)] > 0) continue;
      const NodeId f = forced_[static_cast<std::size_t>(u)];
      const long g = f >= 0 ? gain_[static_cast<std::size_t>(f)] : best_gain_[static_cast<std::size_t>(u)];
      if (g == 0) continue;
      ++count;
      score += g;
    }
    return count < best_count_ || (count == best_count_ && score <= best_score_);
  }

  Mapping current() const {
    Mapping m;
    for (NodeId u = 0; u < base_.size(); ++u)
      if (image_[static_cast<std::size_t>(u)] >= 0) m.emplace_back(u, image_[static_cast<std::size_t>(u)]);
    return m;
  }

  void leaf() {
    if (mode_ == Mode::Best) {
      if (!found_ || count_ > best_count_ || (count_ == best_count_ && score_ > best_score_)) {
        found_ = true;
        best_count_ = count_;
        best_score_ = score_;
        best_mapping_ = current();
      }
      return;
    }
    Mapping m = current();
    if (can_extend(base_, target_, m, options_)) return;
    if (static_cast<int>(maximal_.size()) >= max_mappings_) {
      truncated_ = stop_ = true;
      return;
    }
    maximal_.push_back(std::move(m));
  }

  void dfs(NodeId u) {
    if (stop_) return;
    if (mode_ == Mode::Enumerate && ++steps_ > max_steps_) {
      truncated_ = stop_ = true;
      return;
    }
    if (mode_ == Mode::Best && dominated()) return;
    if (u == base_.size()) {
      leaf();
      return;
    }
    cursor_ = u;
    const NodeId f = forced_[static_cast<std::size_t>(u)];
    const std::size_t saved = mark();
    auto descend_mapped = [&](NodeId t) {
      if (map(u, t)) {
        ++count_;
        score_ += gain_[static_cast<std::size_t>(t)];
        cursor_ = u + 1;
        dfs(u + 1);
        cursor_ = u;
        --count_;
        score_ -= gain_[static_cast<std::size_t>(t)];
      }
      image_[static_cast<std::size_t>(u)] = -1;
      undo(saved);
    };
    if (f >= 0) {
      descend_mapped(f);
      return;
    }
    for (NodeId t = 0; t < target_.size() && !stop_; ++t) descend_mapped(t);
    if (stop_) return;
    skip(u);
    cursor_ = u + 1;
    dfs(u + 1);
    cursor_ = u;
    undo(saved);
  }

  const SmtDag& base_;
  const SmtDag& target_;
  OracleOptions options_;
  Mode mode_ = Mode::Best;
  std::vector<long> gain_;
  std::vector<long> best_gain_;
  std::vector<std::vector<char>> compatible_;
  std::vector<NodeId> image_;
  std::vector<NodeId> forced_;
  std::vector<int> forbid_;
  std::vector<NodeId> owner_;
  std::vector<TrailEntry> trail_;
  NodeId cursor_ = 0;
  int count_ = 0;
  long score_ = 0;

  bool found_ = false;
  int best_count_ = 0;
  long best_score_ = 0;
  Mapping best_mapping_;

  int max_mappings_ = 0;
  std::int64_t max_steps_ = 0;
  std::int64_t steps_ = 0;
  bool stop_ = false;
  bool truncated_ = false;
  std::vector<Mapping> maximal_;
};

void check_limits(const SmtDag& base, const SmtDag& target, const StructureMapLimits& limits) {
  require_valid(base);
  require_valid(target);
  if (base.size() > limits.max_base || target.size() > limits.max_target)
    throw SizeLimitError("exact_structure_map: instance " + std::to_string(base.size()) + "x" +
                         std::to_string(target.size()) + " exceeds limits " + std::to_string(limits.max_base) + "x" +
                         std::to_string(limits.max_target));
}

}  // namespace

Mapping best_structure_map(const SmtDag& base, const SmtDag& target, const StructureMapLimits& limits,
                           const OracleOptions& options) {
  check_limits(base, target, limits);
  StructureSearch search(base, target, options);
  return search.best();
}

StructureMap exact_structure_map(const SmtDag& base, const SmtDag& target, const StructureMapLimits& limits,
                                 const OracleOptions& options) {
  check_limits(base, target, limits);
  StructureMap out;
  {
    StructureSearch search(base, target, options);
    out.best = search.best();
    out.best_count = search.best_count();
    out.best_score = static_cast<double>(search.best_score());
  }
  StructureSearch search(base, target, options);
  search.enumerate(limits.max_mappings, limits.max_enumeration_steps);
  out.maximal = std::move(search.maximal());
  out.truncated = search.truncated();
  return out;
}

}  // namespace smt_analogy
