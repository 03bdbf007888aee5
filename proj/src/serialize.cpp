#include "selfsim/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace selfsim {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

json opt_double(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

}  // namespace

json to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return Rational::from_double(j.get<double>());
  throw error(errc::validation_error, "expected a rational: \"p/q\" or number");
}

json to_json(const IFS& ifs) {
  json t = json::array();
  for (const auto& a : ifs.translations) t.push_back(a.str());
  return json{{"ratio", ifs.ratio.str()}, {"translations", t}};
}

IFS ifs_from_json(const json& j) {
  if (!j.is_object()) throw error(errc::validation_error, "ifs must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "ratio" && key != "translations")
      throw error(errc::validation_error, "unknown key '" + key + "' in ifs");
  }
  if (!j.contains("ratio") || !j.contains("translations"))
    throw error(errc::validation_error, "ifs needs 'ratio' and 'translations'");
  std::vector<Rational> translations;
  for (const auto& t : j.at("translations"))
    translations.push_back(rational_from_json(t));
  return IFS::make(rational_from_json(j.at("ratio")), std::move(translations));
}

json to_json(const DiscreteMeasure& mu) {
  json out = json::array();
  for (std::size_t i = 0; i < mu.size(); ++i)
    out.push_back(json{{"x", mu.positions[i].str()}, {"w", mu.weights[i].str()}});
  return out;
}

DiscreteMeasure measure_from_json(const json& j) {
  if (!j.is_array())
    throw error(errc::validation_error, "measure must be an array of atoms");
  std::vector<Rational> xs, ws;
  for (const auto& atom : j) {
    if (!atom.is_object() || !atom.contains("x") || !atom.contains("w"))
      throw error(errc::validation_error, "atom needs 'x' and 'w'");
    xs.push_back(rational_from_json(atom.at("x")));
    ws.push_back(rational_from_json(atom.at("w")));
  }
  return DiscreteMeasure::make(std::move(xs), std::move(ws));
}

json to_json(const DyadicTree& tree) {
  return json{{"height", tree.height}, {"leaves", tree.leaves}};
}

DyadicTree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("height") || !j.contains("leaves"))
    throw error(errc::validation_error, "tree needs 'height' and 'leaves'");
  return DyadicTree::make(j.at("height").get<int>(),
                          j.at("leaves").get<std::vector<std::uint64_t>>());
}

json to_json(const NormalizationResult& nr) {
  return json{{"report", "normalization"},
              {"ifs", to_json(nr.ifs)},
              {"map_scale", nr.map.scale.str()},
              {"map_offset", nr.map.offset.str()},
              {"changed", nr.changed}};
}

json to_json(const DeltaReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json row{{"n", e.n}, {"delta", e.delta.str()}};
    row["normalized_log"] = e.normalized_log ? json(*e.normalized_log) : json(nullptr);
    entries.push_back(row);
  }
  json out{{"report", "delta_decay"},
           {"entries", entries},
           {"monotone", report.monotone},
           {"rational_bound_ok", report.rational_bound_ok},
           {"Q", report.bound.Q.get_str()},
           {"q", report.bound.q.get_str()}};
  out["overlap_level"] =
      report.overlap_level ? json(*report.overlap_level) : json(nullptr);
  out["decay_exponent_estimate"] = report.decay_exponent_estimate
                                       ? json(*report.decay_exponent_estimate)
                                       : json(nullptr);
  return out;
}

namespace {

json violations_json(const std::vector<SuperadditivityViolation>& violations) {
  json out = json::array();
  for (const auto& v : violations)
    out.push_back(json{{"m", v.m}, {"n", v.n}, {"slack", v.slack}});
  return out;
}

}  // namespace

json to_json(const DimensionReport& report) {
  json rows = json::array();
  for (const auto& v : report.s_values)
    rows.push_back(json{{"n", v.n},
                        {"cover", v.cover},
                        {"s", v.s},
                        {"normalized", v.normalized}});
  return json{{"report", "covering_dimension"},
              {"s_values", rows},
              {"alpha_hat", report.bdim_estimate},
              {"sdim", report.sdim},
              {"beta", report.beta},
              {"superadditivity_violations",
               violations_json(report.superadditivity_violations)}};
}

json to_json(const EntropyReport& report) {
  json rows = json::array();
  for (const auto& e : report.entries)
    rows.push_back(json{{"n", e.n}, {"bits", e.bits}, {"normalized", e.normalized}});
  return json{{"report", "entropy_dimension"},
              {"entries", rows},
              {"alpha_hat", report.alpha_hat},
              {"covering_alpha_hat", report.covering_alpha_hat},
              {"entropy_le_covering", report.entropy_le_covering},
              {"superadditivity_violations",
               violations_json(report.superadditivity_violations)}};
}

namespace {

const char* class_name(LevelClass c) {
  switch (c) {
    case LevelClass::U: return "U";
    case LevelClass::V: return "V";
    default: return "W";
  }
}

}  // namespace

json to_json(const LevelProfile& profile, const LevelPartition* partition) {
  json rows = json::array();
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const auto& r = profile.rows[i];
    json row{{"level", r.level},
             {"frac_full_branching", r.frac_full_branching},
             {"frac_set_concentrated", r.frac_set_concentrated},
             {"frac_entropy_concentrated", r.frac_entropy_concentrated},
             {"frac_entropy_uniform", r.frac_entropy_uniform},
             {"mean_normalized_subtree_entropy", r.mean_normalized_subtree_entropy}};
    if (partition && i < partition->classes.size())
      row["class"] = class_name(partition->classes[i]);
    rows.push_back(row);
  }
  json out{{"report", "level_profile"},
           {"height", profile.height},
           {"m", profile.m},
           {"eps", profile.eps},
           {"rows", rows}};
  if (partition) {
    out["U"] = partition->count(LevelClass::U);
    out["V"] = partition->count(LevelClass::V);
    out["W"] = partition->count(LevelClass::W);
  }
  return out;
}

json to_json(const LocalSumsetProfile& profile) {
  json rows = json::array();
  for (const auto& w : profile.witnesses)
    rows.push_back(json{{"cell_start", w.cell_start.str()},
                        {"count", w.count},
                        {"localized_cover", w.localized_cover},
                        {"sigma_estimate", opt_double(w.sigma_estimate)}});
  return json{{"report", "local_sumset_profile"},
              {"m", profile.m},
              {"n", profile.n},
              {"cells", rows},
              {"cover_full", profile.cover_full},
              {"cover_coarse", profile.cover_coarse},
              {"min_cover_bound", profile.min_cover_bound},
              {"min_bound_holds", profile.min_bound_holds}};
}

json to_json(const SmallSumsetWitness& witness) {
  json y = json::array();
  for (const auto& p : witness.y) y.push_back(p.str());
  return json{{"report", "small_sumset_witness"},
              {"cell_start", witness.cell.cell_start.str()},
              {"count", witness.cell.count},
              {"localized_cover", witness.cell.localized_cover},
              {"cover_y", witness.cover_y},
              {"cover_xy", witness.cover_xy},
              {"y", y}};
}

json to_json(const SumGrowthResult& result) {
  return json{{"report", "sum_growth"},
              {"n", result.n},
              {"cover_x", result.cover_x},
              {"cover_y", result.cover_y},
              {"cover_xy", result.cover_xy},
              {"delta_hat", opt_double(result.delta_hat)}};
}

json to_json(const FiberEntropyProfile& profile) {
  json rows = json::array();
  for (const auto& c : profile.cells)
    rows.push_back(json{{"cell_start", c.cell_start.str()},
                        {"mass", c.mass},
                        {"fiber_entropy_bits", c.fiber_entropy_bits},
                        {"conv_entropy_normalized", c.conv_entropy_normalized}});
  return json{{"report", "fiber_entropy_profile"},
              {"m", profile.m},
              {"n", profile.n},
              {"alpha_hat", profile.alpha_hat},
              {"mass_high_fiber_entropy", profile.mass_high_fiber_entropy},
              {"mass_small_conv_entropy", profile.mass_small_conv_entropy},
              {"cells", rows}};
}

json to_json(const SmallConvolutionWitness& witness) {
  return json{{"report", "small_convolution_witness"},
              {"cell_start", witness.cell_start.str()},
              {"nu", to_json(witness.nu)},
              {"nu_entropy_scaled", witness.nu_entropy_scaled},
              {"conv_entropy_scaled", witness.conv_entropy_scaled},
              {"mu_entropy_scaled", witness.mu_entropy_scaled}};
}

json to_json(const EntropyUniformityResult& result) {
  return json{{"report", "entropy_uniformity"},
              {"mass", result.mass},
              {"alpha_hat", result.alpha_hat},
              {"height", result.height}};
}

json to_json(const ProductBoundInstance& inst) {
  json classes = json::array();
  for (const auto& c : inst.classes)
    classes.push_back(json{{"descendant_count", c.descendant_count},
                           {"c", c.c},
                           {"leaf_mass", c.leaf_mass},
                           {"p", c.p}});
  return json{{"height", inst.tree.height},
              {"leaves", inst.tree.leaves},
              {"m", inst.m},
              {"classes", classes},
              {"bound_log2", inst.bound_log2},
              {"actual", inst.actual},
              {"violation", inst.violation}};
}

json to_json(const ProductBoundSearchResult& result) {
  json v = json::array();
  for (const auto& inst : result.violations) v.push_back(to_json(inst));
  return json{{"report", "product_bound_search"},
              {"h_max", result.h_max},
              {"m", result.m},
              {"mode", result.mode == SearchMode::exhaustive ? "exhaustive" : "random"},
              {"trees_enumerated", result.trees_enumerated},
              {"violation_count", result.violation_count},
              {"exhausted", result.exhausted},
              {"violations", v}};
}

json to_json(const DoublingStats& stats) {
  json out{{"report", "doubling_stats"},
           {"size", stats.size},
           {"sum_size", stats.sum_size},
           {"ratio", stats.ratio}};
  out["growth_exponent"] =
      stats.growth_exponent ? json(*stats.growth_exponent) : json(nullptr);
  return out;
}

json to_json(const SumsetCoverCheck& check) {
  return json{{"report", "sumset_cover_check"},
              {"cover_sum", check.cover_sum},
              {"cover_a", check.cover_a},
              {"cover_b", check.cover_b},
              {"rhs", check.rhs},
              {"holds", check.holds}};
}

// --- CSV ---------------------------------------------------------------

void write_csv(std::ostream& os, const DeltaReport& report) {
  os << "n,delta,normalized_log\n";
  for (const auto& e : report.entries) {
    os << e.n << ',' << e.delta.str() << ',';
    if (e.normalized_log) os << fmt_double(*e.normalized_log);
    os << '\n';
  }
}

void write_csv(std::ostream& os, const DimensionReport& report) {
  os << "n,s_n,alpha_hat\n";
  for (const auto& v : report.s_values)
    os << v.n << ',' << fmt_double(v.s) << ',' << fmt_double(v.normalized)
       << '\n';
}

void write_csv(std::ostream& os, const EntropyReport& report) {
  os << "n,bits,normalized\n";
  for (const auto& e : report.entries)
    os << e.n << ',' << fmt_double(e.bits) << ',' << fmt_double(e.normalized)
       << '\n';
}

void write_csv(std::ostream& os, const LevelProfile& profile,
               const LevelPartition* partition) {
  os << "level,frac_full_branching,frac_set_concentrated,"
        "frac_entropy_concentrated,frac_entropy_uniform,"
        "mean_normalized_subtree_entropy";
  if (partition) os << ",class";
  os << '\n';
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const auto& r = profile.rows[i];
    os << r.level << ',' << fmt_double(r.frac_full_branching) << ','
       << fmt_double(r.frac_set_concentrated) << ','
       << fmt_double(r.frac_entropy_concentrated) << ','
       << fmt_double(r.frac_entropy_uniform) << ','
       << fmt_double(r.mean_normalized_subtree_entropy);
    if (partition && i < partition->classes.size())
      os << ',' << class_name(partition->classes[i]);
    os << '\n';
  }
}

void write_csv(std::ostream& os, const LocalSumsetProfile& profile) {
  os << "cell_start,count,localized_cover\n";
  for (const auto& w : profile.witnesses)
    os << w.cell_start.str() << ',' << w.count << ',' << w.localized_cover << '\n';
}

void write_csv(std::ostream& os, const FiberEntropyProfile& profile) {
  os << "cell_start,mass,fiber_entropy_bits,conv_entropy_normalized\n";
  for (const auto& c : profile.cells)
    os << c.cell_start.str() << ',' << fmt_double(c.mass) << ','
       << fmt_double(c.fiber_entropy_bits) << ','
       << fmt_double(c.conv_entropy_normalized) << '\n';
}

}  // namespace selfsim
