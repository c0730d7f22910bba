#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cade/image.hpp"
#include "cade/rng.hpp"

namespace cade::consensus {

// One expert's lower-likelihood (largest atypical area) and higher-likelihood
// (most profoundly abnormal area) delineations. HL must be contained in LL.
struct ExpertDelineation {
    std::string expert_id;
    BinaryMask ll;
    BinaryMask hl;

    static ExpertDelineation make(std::string expert_id, BinaryMask ll, BinaryMask hl);
};

// The four nested consensus masks plus their non-binary average.
struct ConsensusSet {
    BinaryMask soft;       // LL1 | LL2
    BinaryMask plausible;  // (LL1 & LL2) | HL1 | HL2
    BinaryMask sweet;      // HL1 | HL2
    BinaryMask hard;       // HL1 & HL2
    SoftMask average;      // mean of the four, values in {0, .25, .5, .75, 1}
};

enum class GtStrategy { SoftSpot, PlausibleSpot, SweetSpot, HardSpot, Random, Multiple, Average };

GtStrategy gt_strategy_from_string(const std::string& s);
const char* to_string(GtStrategy strategy);

// 2|a&b| / (|a|+|b|); two empty masks score 1.
double dice(const BinaryMask& a, const BinaryMask& b);

// True iff the HL delineations reach the agreement threshold. A third
// expert is consulted only below it, so exactly 0.30 counts as agreement.
bool check_agreement(const ExpertDelineation& d1, const ExpertDelineation& d2,
                     double threshold = 0.30);

// Index pair (0-based) with maximal HL Dice; ties go to the smallest pair.
std::pair<int, int> select_best_pair(const ExpertDelineation& d1,
                                     const ExpertDelineation& d2,
                                     const ExpertDelineation& d3);

ConsensusSet build_consensus(const ExpertDelineation& d1, const ExpertDelineation& d2);

// Access one of the four binary masks by spot strategy.
const BinaryMask& consensus_mask(const ConsensusSet& set, GtStrategy strategy);

using TrainingTarget = std::variant<BinaryMask, SoftMask, std::array<BinaryMask, 4>>;

// SoftSpot..HardSpot yield that mask; Random draws one of the four uniformly;
// Multiple yields all four; Average yields the soft mask.
TrainingTarget training_target(const ConsensusSet& set, GtStrategy strategy, Rng& rng);

// Pixelwise AND of the three delineations.
BinaryMask born_consensus(const BinaryMask& a, const BinaryMask& b, const BinaryMask& c);

// Pixel positive iff positive in at least `quorum` masks.
BinaryMask argos_consensus(std::span<const BinaryMask> masks, int quorum);

}  // namespace cade::consensus
