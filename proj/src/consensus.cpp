#include "cade/consensus.hpp"

#include "cade/error.hpp"

namespace cade::consensus {

namespace {

void require_same_dims(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("mask dimension mismatch");
}

}  // namespace

ExpertDelineation ExpertDelineation::make(std::string expert_id, BinaryMask ll, BinaryMask hl) {
    require_same_dims(ll, hl);
    for (std::size_t i = 0; i < ll.bits.size(); ++i)
        if (hl.bits[i] && !ll.bits[i])
            throw ValidationError("delineation by '" + expert_id +
                                  "': HL must be contained in LL");
    return ExpertDelineation{std::move(expert_id), std::move(ll), std::move(hl)};
}

GtStrategy gt_strategy_from_string(const std::string& s) {
    if (s == "soft") return GtStrategy::SoftSpot;
    if (s == "plausible") return GtStrategy::PlausibleSpot;
    if (s == "sweet") return GtStrategy::SweetSpot;
    if (s == "hard") return GtStrategy::HardSpot;
    if (s == "random") return GtStrategy::Random;
    if (s == "multiple") return GtStrategy::Multiple;
    if (s == "average") return GtStrategy::Average;
    throw ValidationError("unknown GT strategy '" + s + "'");
}

const char* to_string(GtStrategy strategy) {
    switch (strategy) {
        case GtStrategy::SoftSpot: return "soft";
        case GtStrategy::PlausibleSpot: return "plausible";
        case GtStrategy::SweetSpot: return "sweet";
        case GtStrategy::HardSpot: return "hard";
        case GtStrategy::Random: return "random";
        case GtStrategy::Multiple: return "multiple";
        case GtStrategy::Average: return "average";
    }
    return "?";
}

double dice(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a, b);
    std::size_t inter = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        inter += (a.bits[i] & b.bits[i]);
        na += a.bits[i];
        nb += b.bits[i];
    }
    if (na + nb == 0) return 1.0;  // vacuous agreement
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

bool check_agreement(const ExpertDelineation& d1, const ExpertDelineation& d2,
                     double threshold) {
    return dice(d1.hl, d2.hl) >= threshold;
}

std::pair<int, int> select_best_pair(const ExpertDelineation& d1,
                                     const ExpertDelineation& d2,
                                     const ExpertDelineation& d3) {
    const double d12 = dice(d1.hl, d2.hl);
    const double d13 = dice(d1.hl, d3.hl);
    const double d23 = dice(d2.hl, d3.hl);
    // Lexicographic order (0,1) < (0,2) < (1,2) breaks ties.
    std::pair<int, int> best{0, 1};
    double best_dice = d12;
    if (d13 > best_dice) {
        best = {0, 2};
        best_dice = d13;
    }
    if (d23 > best_dice) {
        best = {1, 2};
    }
    return best;
}

ConsensusSet build_consensus(const ExpertDelineation& d1, const ExpertDelineation& d2) {
    require_same_dims(d1.ll, d2.ll);
    const std::size_t n = d1.ll.bits.size();
    ConsensusSet set;
    set.soft = BinaryMask::filled(d1.ll.width, d1.ll.height, false);
    set.plausible = set.soft;
    set.sweet = set.soft;
    set.hard = set.soft;
    set.average = SoftMask::filled(d1.ll.width, d1.ll.height, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool ll1 = d1.ll.bits[i], ll2 = d2.ll.bits[i];
        const bool hl1 = d1.hl.bits[i], hl2 = d2.hl.bits[i];
        if ((hl1 && !ll1) || (hl2 && !ll2))
            throw ValidationError("build_consensus: HL must be contained in LL");
        const bool soft = ll1 || ll2;
        const bool plausible = (ll1 && ll2) || hl1 || hl2;
        const bool sweet = hl1 || hl2;
        const bool hard = hl1 && hl2;
        set.soft.bits[i] = soft;
        set.plausible.bits[i] = plausible;
        set.sweet.bits[i] = sweet;
        set.hard.bits[i] = hard;
        set.average.values[i] = (soft + plausible + sweet + hard) / 4.0;
    }
    return set;
}

const BinaryMask& consensus_mask(const ConsensusSet& set, GtStrategy strategy) {
    switch (strategy) {
        case GtStrategy::SoftSpot: return set.soft;
        case GtStrategy::PlausibleSpot: return set.plausible;
        case GtStrategy::SweetSpot: return set.sweet;
        case GtStrategy::HardSpot: return set.hard;
        default:
            throw ValidationError("consensus_mask: not a single-mask strategy");
    }
}

TrainingTarget training_target(const ConsensusSet& set, GtStrategy strategy, Rng& rng) {
    switch (strategy) {
        case GtStrategy::SoftSpot:
        case GtStrategy::PlausibleSpot:
        case GtStrategy::SweetSpot:
        case GtStrategy::HardSpot:
            return consensus_mask(set, strategy);
        case GtStrategy::Random: {
            const std::array<const BinaryMask*, 4> all{&set.soft, &set.plausible,
                                                       &set.sweet, &set.hard};
            return *all[rng.below(4)];
        }
        case GtStrategy::Multiple:
            return std::array<BinaryMask, 4>{set.soft, set.plausible, set.sweet, set.hard};
        case GtStrategy::Average:
            return set.average;
    }
    throw ValidationError("training_target: unknown strategy");
}

BinaryMask born_consensus(const BinaryMask& a, const BinaryMask& b, const BinaryMask& c) {
    require_same_dims(a, b);
    require_same_dims(a, c);
    BinaryMask out = BinaryMask::filled(a.width, a.height, false);
    for (std::size_t i = 0; i < a.bits.size(); ++i)
        out.bits[i] = a.bits[i] & b.bits[i] & c.bits[i];
    return out;
}

BinaryMask argos_consensus(std::span<const BinaryMask> masks, int quorum) {
    if (quorum < 1 || static_cast<std::size_t>(quorum) > masks.size())
        throw ValidationError("argos_consensus: quorum must be in [1, |masks|]");
    for (std::size_t k = 1; k < masks.size(); ++k) require_same_dims(masks[0], masks[k]);
    BinaryMask out = BinaryMask::filled(masks[0].width, masks[0].height, false);
    for (std::size_t i = 0; i < out.bits.size(); ++i) {
        int votes = 0;
        for (const auto& m : masks) votes += m.bits[i];
        out.bits[i] = votes >= quorum;
    }
    return out;
}

}  // namespace cade::consensus
