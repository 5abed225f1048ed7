// idla: command-line front end for the simulators, bounds and verifiers.
//
// Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage,
// parameter or input error.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "idla/idla.hpp"

using namespace idla;

namespace {

constexpr int kVerdictFailure = 1;
constexpr int kUsageError = 2;

struct GraphArgs {
  std::string graph;
  std::string origin = "0";
};

Graph load_graph(const std::string& text) {
  if (text.rfind("file:", 0) == 0) return read_edge_list(text.substr(5));
  return generate(text);
}

std::string family_label(const std::string& text) {
  const auto colon = text.find(':');
  return colon == std::string::npos ? text : text.substr(0, colon);
}

void add_graph_options(CLI::App* cmd, GraphArgs& g, bool with_origin = true) {
  cmd->add_option("--graph", g.graph, "family:params (e.g. cycle:64, torus:2:8, gnp:100:0.1:7) or file:<edge list>")
      ->required();
  if (with_origin) cmd->add_option("--origin", g.origin, "origin vertex index or landmark name")->capture_default_str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

RunConfig make_config(const std::string& process, bool lazy, bool continuous) {
  RunConfig cfg;
  cfg.process = process_from_name(process);
  cfg.lazy = lazy;
  cfg.time_model = continuous ? TimeModel::continuous : TimeModel::discrete;
  return cfg;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const double p = std::stod(item);
      if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile level " + item + " outside [0, 1]");
      out.push_back(p);
    } catch (const std::invalid_argument&) {
      throw ParameterError("bad quantile level '" + item + "'");
    }
  }
  return out;
}

template <typename T>
std::vector<T> split_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if constexpr (std::is_same_v<T, std::string>) {
      out.push_back(item);
    } else {
      try {
        out.push_back(static_cast<T>(std::stoull(item)));
      } catch (const std::exception&) {
        throw ParameterError("bad list entry '" + item + "'");
      }
    }
  }
  return out;
}

// Empirical CDF as "value fraction" lines.
void write_ecdf(std::ostream& out, std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  out << "# value ecdf\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i + 1 == values.size() || values[i + 1] != values[i]) out << values[i] << ' ' << (i + 1) / n << '\n';
}

void print_bounds_table(std::ostream& out, const std::string& spec, const bounds::Report& r) {
  auto row = [&](const std::string& name, double v) {
    out << "  " << std::left << std::setw(28) << name << std::right << std::setprecision(8) << v << '\n';
  };
  out << spec << " (n = " << r.n << ", set terms: " << bounds::mode_name(r.mode) << ")\n";
  row("max t_hit", r.t_hit);
  row("lazy t_mix(1/4)", r.t_mix_lazy);
  row("lazy lambda2", r.lambda2_lazy);
  row("basic upper 6 t_hit log2 n", r.basic_upper);
  if (r.refined_parallel_upper) row("refined parallel upper", *r.refined_parallel_upper);
  if (r.refined_sequential_upper) row("refined sequential upper", *r.refined_sequential_upper);
  row("lower: 2|E|/max deg", r.lower_degree);
  if (r.lower_tree) row("lower: tree 2n - 3", *r.lower_tree);
  row("lower: lazy t_mix", r.lower_mixing);
  for (std::size_t j = 0; j < r.set_terms.size(); ++j) row("set term j=" + std::to_string(j + 1), r.set_terms[j]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Internal DLA dispersion simulator, block transforms and bounds"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->capture_default_str();

  // simulate
  GraphArgs sim_g;
  std::string sim_process = "seq", sim_emit, sim_rule = "first_vacant";
  bool sim_lazy = false, sim_continuous = false;
  std::uint64_t sim_seed = 1;
  std::size_t sim_partial = 0;
  auto* sim = app.add_subcommand("simulate", "run one seeded dispersion process and print its result as JSON");
  add_graph_options(sim, sim_g);
  sim->add_option("--process", sim_process, "seq, par or unif")->capture_default_str();
  sim->add_flag("--lazy", sim_lazy, "lazy walks (stay put with probability 1/2)");
  sim->add_flag("--continuous", sim_continuous, "continuous time (rate-1 exponential clocks)");
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--rule", sim_rule, "settle rule: first_vacant or least_action")->capture_default_str();
  sim->add_option("--partial-k", sim_partial, "also report the first time fewer than 2^k - 1 particles move");
  sim->add_option("--emit-block", sim_emit, "write the block (and timing array) as JSON");

  // estimate
  GraphArgs est_g;
  std::string est_process = "seq", est_quantiles = "0.5,0.9,0.99", est_format = "json", est_plot;
  bool est_lazy = false, est_continuous = false;
  std::size_t est_trials = 1000;
  std::uint64_t est_seed = 1;
  auto* est = app.add_subcommand("estimate", "Monte Carlo estimate of the dispersion time");
  add_graph_options(est, est_g);
  est->add_option("--process", est_process, "seq, par or unif")->capture_default_str();
  est->add_flag("--lazy", est_lazy);
  est->add_flag("--continuous", est_continuous);
  est->add_option("--trials", est_trials)->capture_default_str()->check(CLI::PositiveNumber);
  est->add_option("--seed", est_seed)->capture_default_str();
  est->add_option("--quantiles", est_quantiles, "comma-separated quantile levels")->capture_default_str();
  est->add_option("--format", est_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  est->add_option("--plot-data", est_plot, "write the empirical CDF as two columns");

  // bounds
  GraphArgs bnd_g;
  std::string bnd_mode = "auto", bnd_format = "table";
  auto* bnd = app.add_subcommand("bounds", "exact oracles and dispersion bounds for a graph");
  add_graph_options(bnd, bnd_g, false);
  bnd->add_option("--mode", bnd_mode, "set-hitting terms: auto, exact, spectral or basic")->capture_default_str();
  bnd->add_option("--format", bnd_format)->check(CLI::IsMember({"table", "csv", "json"}))->capture_default_str();

  // verify
  GraphArgs ver_g;
  std::string ver_kind, ver_plot;
  std::size_t ver_trials = 1000, ver_mmax = 6;
  std::uint64_t ver_seed = 1;
  double lazy_target = 2.0, lazy_tol = 0.1, ctu_tol = 0.1, conc_fraction = 0.25;
  auto* ver = app.add_subcommand("verify", "check a coupling, bijection or ratio claim; exit 1 on failure");
  ver->add_option("kind", ver_kind, "dominance, bijection, ratios or concentration")
      ->required()
      ->check(CLI::IsMember({"dominance", "bijection", "ratios", "concentration"}));
  add_graph_options(ver, ver_g);
  ver->add_option("--trials", ver_trials)->capture_default_str()->check(CLI::PositiveNumber);
  ver->add_option("--m-max", ver_mmax, "largest total length for the bijection check")->capture_default_str();
  ver->add_option("--seed", ver_seed)->capture_default_str();
  ver->add_option("--lazy-target", lazy_target, "expected lazy-seq/seq ratio")->capture_default_str();
  ver->add_option("--lazy-tol", lazy_tol, "relative tolerance for lazy-seq/seq")->capture_default_str();
  ver->add_option("--ctu-tol", ctu_tol, "relative tolerance for ctu/par around 1")->capture_default_str();
  ver->add_option("--fraction", conc_fraction, "concentration: required fraction of extreme runs")
      ->capture_default_str();
  ver->add_option("--plot-data", ver_plot, "dominance: write level, seq and par quantiles");

  // table
  std::string tab_families = "cycle,hypercube,expander,binary_tree,complete", tab_sizes = "32,64,128", tab_out,
              tab_plot;
  harness::TableOptions tab_opts;
  double tab_factor = 1.5;
  bool tab_no_exact = false;
  auto* tab = app.add_subcommand("table", "growth-order table with normalized dispersion times");
  tab->add_option("--families", tab_families, "comma-separated families (torus2, grid3, expander, ...)")
      ->capture_default_str();
  tab->add_option("--sizes", tab_sizes, "comma-separated sizes")->capture_default_str();
  tab->add_option("--trials", tab_opts.trials)->capture_default_str()->check(CLI::PositiveNumber);
  tab->add_option("--seed", tab_opts.seed)->capture_default_str();
  tab->add_option("--out", tab_out, "CSV output file (stdout when absent)");
  tab->add_option("--factor", tab_factor, "allowed max/min spread of the normalized means")->capture_default_str();
  tab->add_flag("--no-exact", tab_no_exact, "skip the exact t_hit, t_mix and lambda2 columns");
  tab->add_option("--plot-data", tab_plot, "write n and normalized seq/par means per family");

  // enumerate
  GraphArgs enu_g;
  std::size_t enu_m = 0;
  std::string enu_kind = "seq", enu_format = "json";
  auto* enu = app.add_subcommand("enumerate", "list every valid block of total length m (tiny graphs only)");
  add_graph_options(enu, enu_g);
  enu->add_option("--m", enu_m, "total length")->required();
  enu->add_option("--kind", enu_kind)->check(CLI::IsMember({"seq", "par"}))->capture_default_str();
  enu->add_option("--format", enu_format)->check(CLI::IsMember({"json", "count"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*sim) {
      const Graph g = load_graph(sim_g.graph);
      const Vertex origin = resolve_vertex(g, sim_g.origin);
      RunConfig cfg = make_config(sim_process, sim_lazy, sim_continuous);
      if (sim_rule == "least_action") {
        cfg.settle_rule = SettleRule::least_action(g);
      } else if (sim_rule != "first_vacant") {
        throw ParameterError("unknown settle rule '" + sim_rule + "'");
      }
      if (sim_partial > 0) cfg.partial_k = sim_partial;
      const Run r = run(g, origin, cfg, sim_seed);
      json out = to_json(r.result);
      out["graph"] = sim_g.graph;
      out["origin"] = origin;
      out["process"] = process_name(cfg.process);
      out["lazy"] = cfg.lazy;
      out["continuous"] = sim_continuous;
      out["rule"] = cfg.settle_rule.name();
      std::cout << out.dump(2) << '\n';
      if (!sim_emit.empty()) open_out(sim_emit) << to_json(r.block, r.timing ? &*r.timing : nullptr).dump() << '\n';
      return 0;
    }

    if (*est) {
      const Graph g = load_graph(est_g.graph);
      const Vertex origin = resolve_vertex(g, est_g.origin);
      const RunConfig cfg = make_config(est_process, est_lazy, est_continuous);
      harness::EstimateOptions opts;
      opts.levels = parse_levels(est_quantiles);
      opts.threads = threads;
      opts.keep_values = !est_plot.empty();
      const auto e = harness::estimate_dispersion(g, origin, cfg, est_trials, est_seed, opts);
      if (est_format == "csv") {
        std::cout << csv::kEstimateHeader << '\n'
                  << csv::estimate_row(family_label(est_g.graph), g.size(), est_g.origin, process_name(cfg.process),
                                       cfg.lazy, e)
                  << '\n';
      } else {
        json out = to_json(e);
        out.erase("values");
        out["graph"] = est_g.graph;
        out["origin"] = origin;
        out["process"] = process_name(cfg.process);
        out["lazy"] = cfg.lazy;
        out["continuous"] = est_continuous;
        std::cout << out.dump(2) << '\n';
      }
      if (!est_plot.empty()) {
        auto out = open_out(est_plot);
        write_ecdf(out, e.values);
      }
      return 0;
    }

    if (*bnd) {
      const Graph g = load_graph(bnd_g.graph);
      bounds::Mode mode = bounds::Mode::basic;
      if (bnd_mode != "auto")
        mode = bounds::mode_from_name(bnd_mode);
      else if (g.size() <= bounds::kExactSubsetCap)
        mode = bounds::Mode::exact_subsets;
      else if (validate(g).is_regular)
        mode = bounds::Mode::spectral_estimate;
      const auto r = bounds::report(g, mode);
      if (bnd_format == "json") {
        json out = to_json(r);
        out["graph"] = bnd_g.graph;
        std::cout << out.dump(2) << '\n';
      } else if (bnd_format == "csv") {
        auto opt = [](const std::optional<double>& v) { return v ? csv::number(*v) : std::string(); };
        std::cout << "graph,n,mode,t_hit,t_mix_lazy,lambda2_lazy,basic_upper,refined_parallel_upper,"
                     "refined_sequential_upper,lower_degree,lower_tree,lower_mixing\n"
                  << bnd_g.graph << ',' << r.n << ',' << bounds::mode_name(r.mode) << ',' << csv::number(r.t_hit)
                  << ',' << csv::number(r.t_mix_lazy) << ',' << csv::number(r.lambda2_lazy) << ','
                  << csv::number(r.basic_upper) << ',' << opt(r.refined_parallel_upper) << ','
                  << opt(r.refined_sequential_upper) << ',' << csv::number(r.lower_degree) << ','
                  << (r.lower_tree ? csv::number(*r.lower_tree) : "") << ',' << csv::number(r.lower_mixing) << '\n';
      } else {
        print_bounds_table(std::cout, bnd_g.graph, r);
      }
      return 0;
    }

    if (*ver) {
      const Graph g = load_graph(ver_g.graph);
      const Vertex origin = resolve_vertex(g, ver_g.origin);
      json out;
      bool pass = false;
      if (ver_kind == "dominance") {
        const auto r = harness::dominance_experiment(g, origin, ver_trials, ver_seed, threads);
        out = to_json(r);
        pass = r.pass();
        if (r.first_bad_seed) std::cerr << "coupling violated for sequential seed " << *r.first_bad_seed << '\n';
        if (!ver_plot.empty()) {
          auto f = open_out(ver_plot);
          f << "# level seq_quantile par_quantile\n";
          for (const auto& q : r.quantiles) f << q.level << ' ' << q.seq << ' ' << q.par << '\n';
        }
      } else if (ver_kind == "bijection") {
        const auto r = harness::bijection_experiment(g, origin, ver_mmax);
        out = to_json(r);
        pass = r.pass();
      } else if (ver_kind == "ratios") {
        harness::RatioOptions opts;
        opts.threads = threads;
        const auto r = harness::ratio_experiment(g, origin, ver_trials, ver_seed, opts);
        out = to_json(r);
        const auto lazy = *r.ratio("lazy_seq/seq");
        const auto ctu = *r.ratio("ctu/par");
        const bool lazy_ok = std::abs(lazy.value - lazy_target) <= lazy_tol * lazy_target;
        const bool ctu_ok = std::abs(ctu.value - 1.0) <= ctu_tol;
        out["verdicts"] = {{"lazy_seq/seq", lazy_ok}, {"ctu/par", ctu_ok}};
        pass = lazy_ok && ctu_ok;
      } else {
        const auto r = harness::concentration_experiment(g, origin, RunConfig{}, ver_trials, ver_seed,
                                                         conc_fraction, threads);
        out["estimate"] = to_json(r.estimate);
        out["below_mean_fifth"] = r.below_mean_fifth;
        out["above_four_median"] = r.above_four_median;
        out["fraction_threshold"] = r.fraction_threshold;
        pass = r.non_concentrated();
      }
      out["graph"] = ver_g.graph;
      out["kind"] = ver_kind;
      out["pass"] = pass;
      std::cout << out.dump(2) << '\n';
      return pass ? 0 : kVerdictFailure;
    }

    if (*tab) {
      tab_opts.threads = threads;
      tab_opts.exact_columns = !tab_no_exact;
      const auto families = split_list<std::string>(tab_families);
      const auto sizes = split_list<std::size_t>(tab_sizes);
      if (families.empty() || sizes.empty()) throw ParameterError("table needs at least one family and one size");
      const auto rows = harness::table_reproduce(families, sizes, tab_opts);
      std::ofstream file;
      if (!tab_out.empty()) file = open_out(tab_out);
      std::ostream& out = tab_out.empty() ? std::cout : file;
      out << csv::kTableHeader << '\n';
      for (const auto& r : rows) out << csv::table_row(r) << '\n';
      if (!tab_plot.empty()) {
        auto f = open_out(tab_plot);
        std::string current;
        for (const auto& r : rows) {
          if (r.family != current) {
            if (!current.empty()) f << "\n\n";
            f << "# " << r.family << ": n seq_norm par_norm (" << r.growth << ")\n";
            current = r.family;
          }
          f << r.n << ' ' << r.seq_norm << ' ' << r.par_norm << '\n';
        }
      }
      bool pass = true;
      if (sizes.size() > 1) {
        for (const auto& c : harness::growth_stability(rows, tab_factor)) {
          std::cerr << c.family << ": seq spread " << c.seq_spread << ", par spread " << c.par_spread
                    << (c.pass() ? " (stable)" : " (NOT stable)") << '\n';
          pass = pass && c.pass();
        }
      }
      return pass ? 0 : kVerdictFailure;
    }

    if (*enu) {
      const Graph g = load_graph(enu_g.graph);
      const Vertex origin = resolve_vertex(g, enu_g.origin);
      const BlockKind kind = enu_kind == "seq" ? BlockKind::sequential : BlockKind::parallel;
      const auto blocks = enumerate_blocks(g, origin, enu_m, kind);
      if (enu_format == "count") {
        std::cout << blocks.size() << '\n';
      } else {
        json out;
        out["graph"] = enu_g.graph;
        out["origin"] = origin;
        out["m"] = enu_m;
        out["kind"] = enu_kind;
        out["count"] = blocks.size();
        json list = json::array();
        for (const auto& b : blocks) list.push_back(to_json(b));
        out["blocks"] = list;
        std::cout << out.dump(2) << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
