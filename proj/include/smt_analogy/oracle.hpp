#pragma once

#include <cstdint>
#include <vector>

#include "smt_analogy/alignment.hpp"
#include "smt_analogy/dag.hpp"
#include "smt_analogy/errors.hpp"
#include "smt_analogy/synth.hpp"
#include "smt_analogy/vocab.hpp"

namespace smt_analogy {

struct OracleOptions {
  // Entity and Function pairs must share a synonym group (requires vocab).
  bool strict_synonyms = false;
  const SignatureVocab* vocab = nullptr;
};

/// Kind and signature compatibility of a single correspondence.
bool signatures_compatible(const SmtNode& base, const SmtNode& target, const OracleOptions& options = {});

struct RuleReport {
  bool parallel_connectivity = true;
  std::vector<Correspondence> connectivity_violations;
  bool one_to_one = true;
  std::vector<NodeId> base_violations;    // base nodes in more than one correspondence
  std::vector<NodeId> target_violations;  // target nodes in more than one correspondence
  bool tiered_identicality = true;
  std::vector<Correspondence> identicality_violations;
  double systematicity_score = 0.0;
  int correspondence_count = 0;

  bool all_rules() const { return parallel_connectivity && one_to_one && tiered_identicality; }
};

/// Checks an alignment rule by rule. Throws std::invalid_argument on a shape mismatch.
RuleReport verify_alignment(const SmtDag& base, const SmtDag& target, const BinaryAlignment& x,
                            const OracleOptions& options = {});

/// Sum over matched target nodes of (1 + height).
double systematicity_score(const SmtDag& target, const std::vector<Correspondence>& mapping);

struct StructureMapLimits {
  int max_base = 12;
  int max_target = 40;
  int max_mappings = 1000;
  // Search-node budget for the maximal-mapping enumeration.
  std::int64_t max_enumeration_steps = 2'000'000;
};

using Mapping = std::vector<Correspondence>;  // sorted by base id

struct StructureMap {
  Mapping best;
  int best_count = 0;
  double best_score = 0.0;
  std::vector<Mapping> maximal;
  bool truncated = false;  // the maximal list hit a limit
};

/// Exact rule-consistent structure mapping. `best` maximizes
/// (correspondence count, systematicity score) and is the lexicographically
/// smallest pair list among ties. Throws SizeLimitError when the instance
/// exceeds the limits.
StructureMap exact_structure_map(const SmtDag& base, const SmtDag& target, const StructureMapLimits& limits = {},
                                 const OracleOptions& options = {});

/// Only the best mapping; skips the maximal-mapping enumeration.
Mapping best_structure_map(const SmtDag& base, const SmtDag& target, const StructureMapLimits& limits = {},
                           const OracleOptions& options = {});

/// True if some unused pair can be added without breaking a rule.
bool can_extend(const SmtDag& base, const SmtDag& target, const Mapping& mapping, const OracleOptions& options = {});

}  // namespace smt_analogy
