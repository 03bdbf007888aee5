#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "selfsim/constructions.hpp"
#include "selfsim/cover.hpp"
#include "selfsim/ifs.hpp"
#include "selfsim/measure.hpp"
#include "selfsim/tree.hpp"

namespace selfsim {

using nlohmann::json;

// Stable double formatting for CSV ("%.12g"); JSON uses nlohmann's
// shortest-round-trip representation.
std::string fmt_double(double v);

// --- JSON ------------------------------------------------------------------
// Rationals travel as canonical "p/q" strings ("0" and plain integers allowed).

json to_json(const Rational& r);
Rational rational_from_json(const json& j);

json to_json(const IFS& ifs);
IFS ifs_from_json(const json& j);

json to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const json& j);

json to_json(const DyadicTree& tree);
DyadicTree tree_from_json(const json& j);

json to_json(const NormalizationResult& nr);
json to_json(const DeltaReport& report);
json to_json(const DimensionReport& report);
json to_json(const EntropyReport& report);
json to_json(const LevelProfile& profile, const LevelPartition* partition);
json to_json(const LocalSumsetProfile& profile);
json to_json(const SmallSumsetWitness& witness);
json to_json(const SumGrowthResult& result);
json to_json(const FiberEntropyProfile& profile);
json to_json(const SmallConvolutionWitness& witness);
json to_json(const EntropyUniformityResult& result);
json to_json(const ProductBoundInstance& inst);
json to_json(const ProductBoundSearchResult& result);
json to_json(const DoublingStats& stats);
json to_json(const SumsetCoverCheck& check);

// --- CSV -------------------------------------------------------------------

void write_csv(std::ostream& os, const DeltaReport& report);
void write_csv(std::ostream& os, const DimensionReport& report);
void write_csv(std::ostream& os, const EntropyReport& report);
void write_csv(std::ostream& os, const LevelProfile& profile,
               const LevelPartition* partition);
void write_csv(std::ostream& os, const LocalSumsetProfile& profile);
void write_csv(std::ostream& os, const FiberEntropyProfile& profile);

}  // namespace selfsim
