#pragma once

#include "smt_analogy/synth.hpp"
#include "smt_analogy/vocab.hpp"

namespace smt_analogy {

/// Atom (base) vs solar system (target). Figure labels [1]..[9] are base ids
/// 0..8 and [10]..[20] are target ids 0..10.
AnalogyInstance rutherford_instance();

/// Vocabulary for the fixture; "mass" and "weight" share a synonym group.
SignatureVocab rutherford_vocabulary(std::uint64_t master_seed = 0);

}  // namespace smt_analogy
