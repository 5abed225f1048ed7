// serialize.hpp: JSON and CSV forms of blocks, runs, estimates and reports.
//
// Block schema: {"origin": v, "rows": [[v, ...], ...], "timing": [[t, ...], ...]?}
#pragma once

#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "idla/block.hpp"
#include "idla/bounds.hpp"
#include "idla/harness.hpp"
#include "idla/process.hpp"
#include "idla/stats.hpp"

namespace idla {

using json = nlohmann::json;

inline json to_json(const Block& b, const TimingArray* timing = nullptr) {
  json j;
  j["origin"] = b.origin;
  j["rows"] = b.rows;
  if (timing) j["timing"] = timing->times;
  return j;
}

inline Block block_from_json(const json& j) {
  try {
    Block b;
    b.origin = j.at("origin").get<Vertex>();
    b.rows = j.at("rows").get<std::vector<std::vector<Vertex>>>();
    return b;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed block JSON: ") + e.what());
  }
}

inline std::optional<TimingArray> timing_from_json(const json& j) {
  if (!j.contains("timing")) return std::nullopt;
  try {
    return TimingArray{j.at("timing").get<std::vector<std::vector<double>>>()};
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed timing JSON: ") + e.what());
  }
}

inline json to_json(const DispersionResult& r) {
  json j;
  j["dispersion_time"] = r.dispersion_time;
  j["total_length"] = r.total_length;
  j["max_steps"] = r.max_steps;
  j["per_particle_steps"] = r.per_particle_steps;
  j["settle_order"] = r.settle_order;
  j["seed"] = r.seed;
  if (r.partial_time) j["partial_time"] = *r.partial_time;
  return j;
}

inline json to_json(const Run& run) {
  json j;
  j["result"] = to_json(run.result);
  if (!run.block.rows.empty()) j["block"] = to_json(run.block, run.timing ? &*run.timing : nullptr);
  if (!run.order_sequence.empty()) j["order_sequence"] = run.order_sequence;
  return j;
}

inline json to_json(const stats::Estimate& e) {
  json j;
  j["mean"] = e.mean;
  j["stderr"] = e.std_error;
  j["stddev"] = e.stddev;
  j["min"] = e.min;
  j["max"] = e.max;
  j["trials"] = e.trials;
  j["seed"] = e.master_seed;
  json q = json::object();
  for (const auto& [p, v] : e.quantiles) {
    std::ostringstream key;
    key << "q" << p;
    q[key.str()] = v;
  }
  j["quantiles"] = q;
  if (!e.values.empty()) j["values"] = e.values;
  return j;
}

inline json to_json(const bounds::Report& r) {
  json j;
  j["mode"] = bounds::mode_name(r.mode);
  j["n"] = r.n;
  j["t_hit"] = r.t_hit;
  j["t_mix_lazy"] = r.t_mix_lazy;
  j["lambda2_lazy"] = r.lambda2_lazy;
  j["basic_upper"] = r.basic_upper;
  j["refined_parallel_upper"] = r.refined_parallel_upper ? json(*r.refined_parallel_upper) : json(nullptr);
  j["refined_sequential_upper"] = r.refined_sequential_upper ? json(*r.refined_sequential_upper) : json(nullptr);
  j["lower_degree"] = r.lower_degree;
  j["lower_tree"] = r.lower_tree ? json(*r.lower_tree) : json(nullptr);
  j["lower_mixing"] = r.lower_mixing;
  j["set_terms"] = r.set_terms;
  return j;
}

inline json to_json(const harness::DominanceReport& r) {
  json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["shrunk_max_row"] = r.shrunk_max_row;
  j["changed_length"] = r.changed_length;
  j["invalid_output"] = r.invalid_output;
  j["first_bad_seed"] = r.first_bad_seed ? json(*r.first_bad_seed) : json(nullptr);
  j["seq"] = to_json(r.seq);
  j["par"] = to_json(r.par);
  json qs = json::array();
  for (const auto& q : r.quantiles)
    qs.push_back({{"level", q.level}, {"seq", q.seq}, {"par", q.par}, {"compared_level", q.compared_level},
                  {"pass", q.pass}});
  j["quantiles"] = qs;
  j["pass"] = r.pass();
  return j;
}

inline json to_json(const harness::BijectionReport& r) {
  json j;
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"m", x.m},
                    {"seq_count", x.seq_count},
                    {"par_count", x.par_count},
                    {"stp_injective", x.stp_injective},
                    {"stp_into_par", x.stp_into_par},
                    {"pts_injective", x.pts_injective},
                    {"pts_into_seq", x.pts_into_seq},
                    {"roundtrip", x.roundtrip},
                    {"pass", x.pass()}});
  j["rows"] = rows;
  if (r.counterexample) j["counterexample"] = to_json(*r.counterexample);
  j["pass"] = r.pass();
  return j;
}

inline json to_json(const harness::RatioReport& r) {
  json j;
  json pools = json::object();
  for (const auto& [name, e] : r.pools) pools[name] = to_json(e);
  j["pools"] = pools;
  json ratios = json::object();
  for (const auto& x : r.ratios) ratios[x.name] = {{"value", x.ratio.value}, {"stderr", x.ratio.std_error}};
  j["ratios"] = ratios;
  return j;
}

namespace csv {

inline constexpr const char* kEstimateHeader = "family,n,origin,process,lazy,trials,seed,mean,stderr,q50,q90,q99,min,max";

inline std::string number(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

/// One row under kEstimateHeader. Missing quantiles are left empty.
inline std::string estimate_row(const std::string& family, std::size_t n, const std::string& origin,
                                std::string_view process, bool lazy, const stats::Estimate& e) {
  std::ostringstream os;
  auto q = [&](double p) {
    const auto v = e.quantile(p);
    return v ? number(*v) : std::string();
  };
  os << family << ',' << n << ',' << origin << ',' << process << ',' << (lazy ? 1 : 0) << ',' << e.trials << ','
     << e.master_seed << ',' << number(e.mean) << ',' << number(e.std_error) << ',' << q(0.5) << ',' << q(0.9) << ','
     << q(0.99) << ',' << number(e.min) << ',' << number(e.max);
  return os.str();
}

inline constexpr const char* kTableHeader =
    "family,n,spec,origin_seq,origin_par,trials,t_seq_mean,t_seq_stderr,t_par_mean,t_par_stderr,t_hit,t_mix,lambda2,"
    "growth,seq_norm,par_norm";

inline std::string table_row(const harness::TableRow& r) {
  auto opt = [](const std::optional<double>& x) { return x ? number(*x) : std::string(); };
  std::ostringstream os;
  os << r.family << ',' << r.n << ',' << r.spec << ',' << r.seq.origin << ',' << r.par.origin << ','
     << r.seq.estimate.trials << ',' << number(r.seq.estimate.mean) << ',' << number(r.seq.estimate.std_error) << ','
     << number(r.par.estimate.mean) << ',' << number(r.par.estimate.std_error) << ',' << opt(r.t_hit) << ','
     << opt(r.t_mix) << ',' << opt(r.lambda2) << ',' << r.growth << ',' << number(r.seq_norm) << ','
     << number(r.par_norm);
  return os.str();
}

}  // namespace csv

}  // namespace idla
