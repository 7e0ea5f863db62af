#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <sstream>

#include "config.hpp"
#include "treecolor/canonical.hpp"
#include "treecolor/errors.hpp"
#include "treecolor/oracle.hpp"
#include "treecolor/spectral.hpp"
#include "treecolor/star.hpp"
#include "treecolor/tensorization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace treecolor::cli {
namespace {

struct Context {
  std::string command;
  Config cfg;
  fs::path out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw VerificationFailure(what);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write " + path.string());
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_field(fields[i]);
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

json base_record(const Context& ctx, const Tree* tree) {
  json j;
  j["command"] = ctx.command;
  j["config"] = ctx.cfg.values();
  j["seed"] = ctx.seed;
  j["jobs"] = ctx.jobs;
  if (tree) {
    j["tree_hash"] = tree->content_hash();
    j["tree"] = tree->describe();
  }
  return j;
}

void write_json(const Context& ctx, const json& j) {
  std::ofstream out(ctx.out_dir / (ctx.command + ".json"), std::ios::binary);
  if (!out) throw ConfigError("cannot write to " + ctx.out_dir.string());
  out << j.dump(2) << "\n";
}

ChainSpec chain_from(const Config& cfg, const Tree& tree) {
  const ChainKind kind = parse_chain_kind(cfg.get("chain.kind", "heatbath_glauber"));
  const bool singletons = cfg.get<bool>("chain.singletons", true);
  switch (kind) {
    case ChainKind::uniform_glauber: return ChainSpec::uniform_glauber();
    case ChainKind::heatbath_glauber: return ChainSpec::heatbath_glauber();
    case ChainKind::neighbor_pair: return ChainSpec::neighbor_pair(singletons);
    case ChainKind::block: break;
  }
  // "0 1; 2; 3 4"
  std::vector<WeightedBlock> blocks;
  std::stringstream all(cfg.require<std::string>("chain.blocks"));
  std::string part;
  while (std::getline(all, part, ';')) {
    std::stringstream ss(part);
    Block b;
    EdgeId e;
    while (ss >> e) {
      if (e >= tree.num_edges()) throw ConfigError(fmt::format("block edge {} out of range", e));
      b.push_back(e);
    }
    if (!b.empty()) blocks.push_back({std::move(b), 1.0});
  }
  if (blocks.empty()) throw ConfigError("chain.blocks is empty");
  return ChainSpec::block(std::move(blocks));
}

std::vector<EdgeId> edge_list(const Config& cfg, const std::string& key, const Tree& tree) {
  auto v = cfg.list<EdgeId>(key);
  for (EdgeId e : v)
    if (e >= tree.num_edges()) throw ConfigError(fmt::format("{}: edge {} out of range", key, e));
  return v;
}

SpectralOptions spectral_from(const Config& cfg) {
  SpectralOptions opt;
  opt.caps = caps_from(cfg);
  return opt;
}

double trel_of(const Tree& tree, const ListSpec& lists, const ChainSpec& spec, const DistributionTable& dist,
               const SpectralOptions& opt) {
  const TransitionMatrix P = transition_matrix(tree, lists, spec, dist, opt.caps);
  return spectral_report(P, opt).t_rel;
}

// Commands

int cmd_enumerate(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const ListSpec lists = lists_from(ctx.cfg, tree);
  const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(ctx.cfg));
  const BigInt dp = count_colorings(tree, lists);
  check(dp == BigInt(dist.size()), fmt::format("enumeration {} != dp count {}", dist.size(), dp.str()));
  CsvWriter csv(ctx.out_dir / "states.csv");
  csv.row({"index", "coloring"});
  for (std::size_t i = 0; i < dist.size(); ++i) csv.row({std::to_string(i), format_colors(dist.state(i))});
  json j = base_record(ctx, &tree);
  j["q"] = lists.q();
  j["lists"] = lists.preset_name();
  j["count"] = dist.size();
  j["dp_count"] = dp.str();
  write_json(ctx, j);
  fmt::print("enumerate: {} colorings\n", dist.size());
  return 0;
}

int cmd_count(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const ListSpec lists = lists_from(ctx.cfg, tree);
  const BigInt dp = count_colorings(tree, lists);
  json j = base_record(ctx, &tree);
  j["q"] = lists.q();
  j["lists"] = lists.preset_name();
  j["count"] = dp.str();
  if (dp <= BigInt(enumeration_cap(ctx.cfg))) {
    const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(ctx.cfg));
    check(dp == BigInt(dist.size()), fmt::format("dp count {} != enumeration {}", dp.str(), dist.size()));
    j["enumerated"] = dist.size();
  }
  write_json(ctx, j);
  fmt::print("count: {}\n", dp.str());
  return 0;
}

int cmd_gap(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const ListSpec lists = lists_from(ctx.cfg, tree);
  const ChainSpec spec = chain_from(ctx.cfg, tree);
  const SpectralOptions opt = spectral_from(ctx.cfg);
  const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(ctx.cfg));
  const TransitionMatrix P = transition_matrix(tree, lists, spec, dist, opt.caps);
  const double rows = row_sum_error(P);
  const double balance = detailed_balance_error(P);
  const double stat = stationarity_error(P);
  check(rows <= 1e-12, fmt::format("row sums off by {}", rows));
  check(balance <= 1e-12, fmt::format("detailed balance error {}", balance));
  const SpectralReport rep = spectral_report(P, opt);
  if (spec.kind == ChainKind::heatbath_glauber || spec.kind == ChainKind::neighbor_pair)
    check(rep.lambda_min >= -1e-9, fmt::format("heat-bath lambda_min {} < 0", rep.lambda_min));

  std::optional<std::uint64_t> tmix;
  json j = base_record(ctx, &tree);
  if (dist.size() <= opt.caps.mixing_cap) {
    tmix = mixing_time(P, 0.25, opt.caps);
    const double bound = rep.t_rel * (1.0 + static_cast<double>(tree.num_edges()) * std::log(lists.q()));
    check(static_cast<double>(*tmix) <= bound, fmt::format("t_mix {} > bound {}", *tmix, bound));
    j["t_mix_bound"] = bound;
  }
  j.update(json::parse(to_json(rep, spec.kind, tree.describe(), lists.q(), dist.size(), tmix)));
  j["row_sum_error"] = rows;
  j["detailed_balance_error"] = balance;
  j["stationarity_error"] = stat;
  if (dist.size() <= opt.caps.jacobi_cap) {
    CsvWriter csv(ctx.out_dir / "spectrum.csv");
    csv.row({"index", "eigenvalue"});
    const auto ev = spectrum(P, opt.caps);
    for (std::size_t i = 0; i < ev.size(); ++i) csv.row({std::to_string(i), num(ev[i])});
  }
  write_json(ctx, j);
  fmt::print("gap: N={} t_rel={:.12g} gap={:.12g}\n", dist.size(), rep.t_rel, rep.gap);
  return 0;
}

int cmd_mix(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const ListSpec lists = lists_from(ctx.cfg, tree);
  const ChainSpec spec = chain_from(ctx.cfg, tree);
  const SpectralOptions opt = spectral_from(ctx.cfg);
  const double eps = ctx.cfg.get<double>("run.eps", 0.25);
  if (!(eps > 0 && eps < 1)) throw ConfigError("run.eps must lie in (0, 1)");
  const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(ctx.cfg));
  const TransitionMatrix P = transition_matrix(tree, lists, spec, dist, opt.caps);
  const SpectralReport rep = spectral_report(P, opt);
  const std::uint64_t tmix = mixing_time(P, eps, opt.caps);
  const double n = static_cast<double>(tree.num_edges());
  // pi_min >= q^-n
  const double bound = rep.t_rel * (std::log(1.0 / eps) + n * std::log(lists.q()));
  const double quarter_bound = rep.t_rel * (1.0 + n * std::log(lists.q()));
  json j = base_record(ctx, &tree);
  j["N"] = dist.size();
  j["eps"] = eps;
  j["t_mix"] = tmix;
  j["t_rel"] = rep.t_rel;
  j["bound"] = bound;
  if (eps == 0.25) {
    j["quarter_bound"] = quarter_bound;
    check(static_cast<double>(tmix) <= quarter_bound, fmt::format("t_mix {} > {}", tmix, quarter_bound));
  }
  check(static_cast<double>(tmix) <= bound, fmt::format("t_mix({}) = {} > {}", eps, tmix, bound));

  const auto steps = ctx.cfg.get<std::uint64_t>("run.steps", 0);
  if (steps > 0) {
    const RunResult run =
        run_chain(tree, lists, spec, steps, RngSpec{ctx.seed, 0}, dist.state(0), ctx.cfg.get<bool>("run.trace", true));
    check(is_proper(tree, lists, run.final_state), "simulation left the proper colorings");
    j["simulation"] = {{"steps", steps}, {"final_state", format_colors(run.final_state)}};
    if (!run.trace.empty()) {
      std::ofstream trace(ctx.out_dir / "trace.csv", std::ios::binary);
      write_trace_csv(trace, run.trace);
    }
  }
  write_json(ctx, j);
  fmt::print("mix: t_mix({})={} bound={:.6g}\n", eps, tmix, bound);
  return 0;
}

int cmd_conductance(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const ListSpec lists = lists_from(ctx.cfg, tree);
  const ChainSpec spec = chain_from(ctx.cfg, tree);
  const SpectralOptions opt = spectral_from(ctx.cfg);
  const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(ctx.cfg));
  const TransitionMatrix P = transition_matrix(tree, lists, spec, dist, opt.caps);
  const SpectralReport rep = spectral_report(P, opt);
  const CutResult cut = conductance_star(P, dist);
  const double inv = 1.0 / rep.t_rel;
  // Phi_* is only bounded above by the best color cut, so only the upper side is asserted.
  const bool upper = inv <= 2.0 * cut.phi + 1e-12;
  const bool lower = cut.phi * cut.phi / 2.0 <= inv + 1e-12;
  check(upper, fmt::format("1/T_rel = {} > 2 Phi = {}", inv, 2 * cut.phi));
  json j = base_record(ctx, &tree);
  j["N"] = dist.size();
  j["t_rel"] = rep.t_rel;
  j["phi_cut"] = cut.phi;
  j["cut_mass"] = cut.mass;
  j["cut"] = cut.label;
  j["cheeger_upper_ok"] = upper;
  j["cheeger_lower_ok_for_cut"] = lower;
  write_json(ctx, j);
  fmt::print("conductance: phi<={:.6g} ({}), 1/t_rel={:.6g}\n", cut.phi, cut.label, inv);
  return 0;
}

int cmd_lowerbound(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const int q = ctx.cfg.require<int>("coloring.q");
  const int delta = tree.max_degree();
  EdgeId e = 0;
  if (ctx.cfg.has("lowerbound.edge")) {
    e = ctx.cfg.require<EdgeId>("lowerbound.edge");
  } else {
    const auto found = std::find_if(tree.edges().begin(), tree.edges().end(), [&](const Edge& ed) {
      return tree.degree(ed.parent) == delta && tree.degree(ed.child) == delta;
    });
    if (found == tree.edges().end()) throw ParameterError("no edge with both endpoints of maximum degree");
    e = static_cast<EdgeId>(found - tree.edges().begin());
  }
  const LowerBoundRecord r = lower_bound_check(tree, e, q, spectral_from(ctx.cfg));
  json j = base_record(ctx, &tree);
  j["edge"] = e;
  j["Delta"] = r.delta;
  j["q"] = r.q;
  j["n"] = r.n;
  j["p_frozen_exact"] = r.p_frozen_exact;
  j["p_frozen_formula"] = r.p_frozen_formula;
  j["p_frozen_counted"] = r.p_frozen_counted;
  j["t_rel"] = r.t_rel;
  j["t_rel_bound"] = r.trel_bound;
  j["phi_cut"] = r.phi_cut;
  j["cheeger_lower_ok"] = r.cheeger_lower_ok;
  j["cheeger_upper_ok"] = r.cheeger_upper_ok;
  CsvWriter csv(ctx.out_dir / "lowerbound.csv");
  csv.row({"Delta", "q", "n", "p_frozen_exact", "p_frozen_formula", "p_frozen_counted", "t_rel", "t_rel_bound"});
  csv.row({std::to_string(r.delta), std::to_string(r.q), std::to_string(r.n), num(r.p_frozen_exact),
           num(r.p_frozen_formula), num(r.p_frozen_counted), num(r.t_rel), num(r.trel_bound)});
  write_json(ctx, j);
  check(r.probabilities_agree,
        fmt::format("frozen probability {} != formula {}", r.p_frozen_exact, r.p_frozen_formula));
  check(r.trel_ok, fmt::format("t_rel {} < bound {}", r.t_rel, r.trel_bound));
  check(r.cheeger_upper_ok, "1/T_rel > 2 Phi for the color cut");
  fmt::print("lowerbound: p_frozen {:.12g} / {:.12g}, t_rel {:.6g} >= {:.6g}\n", r.p_frozen_exact,
             r.p_frozen_formula, r.t_rel, r.trel_bound);
  return 0;
}

PathFamily family_from(const Config& cfg) {
  const std::string f = cfg.get("congestion.family", "glauber");
  if (f == "glauber") return PathFamily::glauber;
  if (f == "edge_dynamics") return PathFamily::edge_dynamics;
  throw ConfigError("unknown congestion.family '" + f + "'");
}

int cmd_congestion(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const ListSpec lists = lists_from(ctx.cfg, tree, "star_root");
  const PathFamily family = family_from(ctx.cfg);
  const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(ctx.cfg));
  const PathSweep sweep = sweep_paths(family, tree, lists, dist);
  const CongestionReport rep = congestion(family, tree, lists, dist);
  const int ell = tree.max_level();

  json j = base_record(ctx, &tree);
  j["N"] = dist.size();
  j["congestion"] = json::parse(rep.to_json());
  j["paths"] = {{"paths", sweep.paths},
                {"verified", sweep.verified},
                {"reversal_ok", sweep.reversal_ok},
                {"stage_two_leaf_free", sweep.stage_two_leaf_free},
                {"max_length", sweep.max_length},
                {"first_failure", sweep.first_failure}};

  CsvWriter csv(ctx.out_dir / "congestion_pairs.csv");
  std::vector<std::string> header{"a", "b"};
  for (int t = 0; t <= ell; ++t) header.push_back(fmt::format("xi_{}", t));
  header.insert(header.end(), {"xi_A", "r_ab", "xi_leaf_over_r"});
  csv.row(header);
  auto& ratios = j["xi_leaf_over_r"] = json::array();
  for (const auto& p : rep.pairs) {
    const double ratio = p.r_ab > 0 ? p.xi[ell] / p.r_ab : 0.0;
    ratios.push_back({{"a", p.a}, {"b", p.b}, {"ratio", ratio}});
    std::vector<std::string> row{std::to_string(p.a), std::to_string(p.b)};
    for (double x : p.xi) row.push_back(num(x));
    row.insert(row.end(), {num(p.xi_A), num(p.r_ab), num(ratio)});
    csv.row(row);
  }

  check(sweep.verified == sweep.paths, "canonical path failed: " + sweep.first_failure);
  if (family == PathFamily::glauber) {
    check(sweep.reversal_ok == sweep.paths, "stage III does not reverse stage I");
    const LeafLoadResult leaf = leaf_load_check(tree, lists, dist);
    const auto spine = spine_probability_check(tree, lists, dist);
    const auto bad_spine = std::count_if(spine.begin(), spine.end(), [](const SpineProbabilityRow& r) { return !r.ok; });
    j["leaf_load_bound"] = {{"checked", leaf.checked}, {"violations", leaf.violations}, {"max_ratio", leaf.max_ratio}};
    j["spine_probability_bound"] = {{"rows", spine.size()}, {"violations", bad_spine}};
    CsvWriter rows(ctx.out_dir / "spine_probability.csv");
    rows.row({"a", "b", "s", "x", "joint", "conditional", "bound", "skipped", "ok"});
    for (const auto& r : spine)
      rows.row({std::to_string(r.a), std::to_string(r.b), std::to_string(r.s), std::to_string(r.x), num(r.joint),
                num(r.conditional), num(r.bound), r.skipped ? "1" : "0", r.ok ? "1" : "0"});
    write_json(ctx, j);
    check(leaf.violations == 0, "leaf load bound violated: " + leaf.first_violation);
    check(bad_spine == 0, "spine probability bound violated");
  } else {
    if (ell == 1) {
      const RoutingBound rb = routing_bound_ell1(tree.max_degree());
      j["routing"] = {{"alpha", rb.alpha}, {"expected_steps", rb.expected_steps}, {"certified", rb.certified}};
      write_json(ctx, j);
      check(rb.certified, "routing bound exceeds (4 Delta, 8)");
    } else {
      write_json(ctx, j);
    }
  }
  fmt::print("congestion: {} paths verified, xi = [{}], xi_A = {:.6g}\n", sweep.verified,
             fmt::join(rep.xi, ", "), rep.xi_A);
  return 0;
}

json certificate_json(const Certificate& c) { return json::parse(c.to_json()); }

std::vector<double> root_alpha(const Context& ctx, const Tree& tree, const ListSpec& lists,
                               const DistributionTable& dist) {
  auto alpha = ctx.cfg.list<double>("tensorize.alpha");
  if (!alpha.empty()) return alpha;
  const CongestionReport rep = congestion(PathFamily::glauber, tree, lists, dist);
  for (double x : rep.xi) alpha.push_back((tree.max_level() + 1) * x);
  return alpha;
}

std::vector<Block> blocks_from(const Config& cfg, const Tree& tree) {
  const std::string kind = cfg.get("tensorize.blocks", "singletons");
  if (kind == "singletons") return singleton_blocks(tree);
  if (kind == "pairs") return pair_blocks(tree, true);
  throw ConfigError("unknown tensorize.blocks '" + kind + "'");
}

int cmd_tensorize(const Context& ctx) {
  const Tree tree = tree_from(ctx.cfg);
  const std::string mode = ctx.cfg.get("tensorize.mode", "at_constant");
  json j = base_record(ctx, &tree);
  j["mode"] = mode;

  if (mode == "monotonicity") {
    const Tree sub = tree_from(ctx.cfg, "subtree");
    const int q = ctx.cfg.require<int>("coloring.q");
    const MonotonicityRecord m = check_monotonicity(tree, sub, q);
    j["subtree_hash"] = sub.content_hash();
    j["subtree"] = sub.describe();
    j["C_super"] = m.c_super;
    j["C_sub"] = m.c_sub;
    j["C_pairs_super"] = m.edge_super;
    j["C_pairs_sub"] = m.edge_sub;
    j["singleton_ok"] = m.singleton_ok;
    j["pairs_ok"] = m.edge_ok;
    write_json(ctx, j);
    check(m.singleton_ok, fmt::format("C_sub {} > q C_super {}", m.c_sub, q * m.c_super));
    check(m.edge_ok, fmt::format("pair constant {} > (q+1)^2 {}", m.edge_sub, (q + 1) * (q + 1) * m.edge_super));
    fmt::print("tensorize monotonicity: C {:.6g} -> {:.6g}, pairs {:.6g} -> {:.6g}\n", m.c_super, m.c_sub,
               m.edge_super, m.edge_sub);
    return 0;
  }

  const ListSpec lists = lists_from(ctx.cfg, tree);
  const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(ctx.cfg));
  j["N"] = dist.size();
  const SpectralOptions opt = spectral_from(ctx.cfg);

  if (mode == "total_variance") {
    const auto S = edge_list(ctx.cfg, "tensorize.s1", tree);
    const double err = total_variance_error(dist, S);
    j["error"] = err;
    write_json(ctx, j);
    check(err <= 1e-12, fmt::format("total variance identity off by {}", err));
    fmt::print("tensorize total_variance: error {:.3g}\n", err);
  } else if (mode == "at_constant") {
    const auto blocks = blocks_from(ctx.cfg, tree);
    const double C = optimal_AT_constant(tree, dist, blocks, kDenseFormCap, opt);
    const bool pairs = ctx.cfg.get("tensorize.blocks", "singletons") == "pairs";
    const ChainSpec chain = pairs ? ChainSpec::neighbor_pair(true) : ChainSpec::heatbath_glauber();
    const double t_rel = trel_of(tree, lists, chain, dist, opt);
    const double scaled = C * static_cast<double>(blocks.size());
    const double rel = std::abs(scaled - t_rel) / t_rel;
    j["constant"] = C;
    j["blocks"] = blocks.size();
    j["t_rel"] = t_rel;
    j["relative_error"] = rel;
    write_json(ctx, j);
    check(rel <= 1e-6, fmt::format("C |B| = {} but t_rel = {}", scaled, t_rel));
    fmt::print("tensorize at_constant: C={:.10g} C|B|={:.10g} t_rel={:.10g}\n", C, scaled, t_rel);
  } else if (mode == "root") {
    if (!tree.has_hanging_root()) throw ConfigError("root tensorization needs a hanging tree");
    const auto alpha = root_alpha(ctx, tree, lists, dist);
    if (static_cast<int>(alpha.size()) != tree.max_level() + 1)
      throw ConfigError(fmt::format("tensorize.alpha needs {} entries", tree.max_level() + 1));
    const Certificate cert = ctx.cfg.has("tensorize.beta")
                                 ? check_root_factorization(tree, dist, alpha, ctx.cfg.require<double>("tensorize.beta"))
                                 : check_root_tensorization(tree, dist, alpha);
    j["alpha"] = alpha;
    j["certificate"] = certificate_json(cert);
    write_json(ctx, j);
    check(cert.holds(), fmt::format("{} failed, min eigenvalue {}", cert.inequality, cert.min_eigenvalue));
    fmt::print("tensorize root: {} (min eig {:.6g})\n", to_string(cert.verdict), cert.min_eigenvalue);
  } else if (mode == "block") {
    const auto blocks = blocks_from(ctx.cfg, tree);
    double C = 0;
    if (ctx.cfg.has("tensorize.constant")) {
      C = ctx.cfg.require<double>("tensorize.constant");
    } else {
      C = bisect_block_constant(dist, blocks);
      j["optimal_constant"] = optimal_AT_constant(tree, dist, blocks, kDenseFormCap, opt);
    }
    if (!std::isfinite(C) || C <= 0) throw DomainError("block constant is not finite");
    std::vector<WeightedBlock> weighted;
    for (const auto& b : blocks) weighted.push_back({b, C});
    const Certificate cert = check_block_factorization(dist, weighted);
    j["constant"] = C;
    j["blocks"] = blocks.size();
    j["certificate"] = certificate_json(cert);
    write_json(ctx, j);
    check(cert.holds(), fmt::format("block factorization with C = {} failed", C));
    fmt::print("tensorize block: C={:.10g} {}\n", C, to_string(cert.verdict));
  } else if (mode == "exchange") {
    const auto S1 = edge_list(ctx.cfg, "tensorize.s1", tree);
    const auto S2 = edge_list(ctx.cfg, "tensorize.s2", tree);
    const ExchangeRecord r = variance_exchange_checks(tree, dist, S1, S2, 100, ctx.seed);
    j["samples"] = r.samples;
    j["violations"] = r.violations;
    j["max_excess"] = r.max_excess;
    j["commutation_error"] = r.commutation_error;
    write_json(ctx, j);
    check(r.violations == 0, fmt::format("{} exchange violations", r.violations));
    check(r.commutation_error < 1e-12, fmt::format("commutation error {}", r.commutation_error));
    fmt::print("tensorize exchange: {} samples ok\n", r.samples);
  } else {
    throw ConfigError("unknown tensorize.mode '" + mode + "'");
  }
  return 0;
}

int cmd_induction(const Context& ctx) {
  const std::string variant = ctx.cfg.get("induction.variant", "singleton");
  const int delta = ctx.cfg.require<int>("induction.delta");
  const int ell = ctx.cfg.require<int>("induction.ell");
  const int k = ctx.cfg.require<int>("induction.k");
  json j = base_record(ctx, nullptr);
  const Tree tk = Tree::complete_regular(delta, k);
  j["tree_hash"] = tk.content_hash();
  j["tree"] = tk.describe();
  if (variant == "singleton") {
    const int q = ctx.cfg.get<int>("induction.q", delta + 2);
    const InductionRun run = induction_pipeline(delta, q, ell, k);
    const FBoundCheck fb = check_f_bounds(ell, run.alpha, run.gamma, std::max(6 * ell, k));
    j["run"] = json::parse(run.to_json());
    j["f_bounds"] = {{"checked", fb.checked}, {"violations", fb.violations}, {"max_ratio", fb.max_ratio}};
    write_json(ctx, j);
    check(run.root.holds(), "root tensorization certificate failed");
    check(run.induction.holds(), "induction certificate failed");
    check(fb.violations == 0, "F recursion exceeds its closed-form bound");
    check(run.optimal_constant <= run.theorem_bound * (1 + 1e-9), "optimal constant above theorem bound");
    fmt::print("induction: alpha=[{}] gamma={:.6g} bound={:.6g} optimal={:.6g}\n", fmt::join(run.alpha, ", "),
               run.gamma, run.theorem_bound, run.optimal_constant);
  } else if (variant == "block") {
    const BlockInductionRun run = block_induction_pipeline(delta, ell, k);
    j["run"] = json::parse(run.to_json());
    write_json(ctx, j);
    check(run.root.holds(), "root factorization certificate failed");
    check(run.factorization.holds(), "block factorization certificate failed");
    fmt::print("induction block: beta={:.6g} gamma={:.6g} constant={:.6g}\n", run.beta, run.gamma, run.constant);
  } else {
    throw ConfigError("unknown induction.variant '" + variant + "'");
  }
  return 0;
}

int cmd_star_analysis(const Context& ctx) {
  auto deltas = ctx.cfg.list<int>("star.delta");
  if (deltas.empty()) deltas = {2, 3, 4, 5, 6};
  json j = base_record(ctx, nullptr);
  auto& rows = j["stars"] = json::array();
  CsvWriter csv(ctx.out_dir / "star_analysis.csv");
  csv.row({"Delta", "closed_form_error", "identity_error", "lambda_max", "lambda_bound", "at_constant",
           "local_to_global"});
  const double at_cap = std::exp(std::numbers::pi * std::numbers::pi / 6.0);
  std::vector<std::string> failures;
  for (int d : deltas) {
    if (d < 2) throw ConfigError("star.delta entries must be >= 2");
    const int q = d + 1;
    const Eigen::MatrixXd psi = star_correlation_matrix(d);
    const double closed = (psi - star_correlation_closed_form(d)).cwiseAbs().maxCoeff();
    const Eigen::Index m = psi.rows();
    const Eigen::MatrixXd rhs = (d - 1) * star_local_walk(d) - Eigen::MatrixXd::Constant(m, m, 1.0 / q) +
                                Eigen::MatrixXd::Identity(m, m);
    const double ident = (psi - rhs).cwiseAbs().maxCoeff();
    const double lmax = lambda_max(psi);
    const Tree star = Tree::star(d);
    const DistributionTable dist = enumerate_colorings(star, ListSpec::uniform(star, q));
    const double at = optimal_AT_constant(star, dist, singleton_blocks(star));
    const double l2g = local_to_global_constant(d);
    rows.push_back({{"Delta", d},
                    {"closed_form_error", closed},
                    {"identity_error", ident},
                    {"lambda_max", lmax},
                    {"at_constant", at},
                    {"local_to_global", l2g}});
    csv.row({std::to_string(d), num(closed), num(ident), num(lmax), num(1.0 + 1.0 / d), num(at), num(l2g)});
    if (closed > 1e-12) failures.push_back(fmt::format("Delta={}: closed form off by {}", d, closed));
    if (ident > 1e-12) failures.push_back(fmt::format("Delta={}: identity off by {}", d, ident));
    if (lmax > 1.0 + 1.0 / d + 1e-9) failures.push_back(fmt::format("Delta={}: lambda_max {}", d, lmax));
    if (at > at_cap) failures.push_back(fmt::format("Delta={}: AT constant {} > {}", d, at, at_cap));
    if (d == 2 && std::abs(l2g - 2.0) > 1e-9) failures.push_back(fmt::format("local-to-global {} != 2", l2g));
  }
  j["at_cap"] = at_cap;
  j["failures"] = failures;
  write_json(ctx, j);
  check(failures.empty(), failures.empty() ? "" : failures.front());
  fmt::print("star_analysis: {} stars ok\n", deltas.size());
  return 0;
}

int cmd_sweep(const Context& ctx) {
  const std::string param = ctx.cfg.require<std::string>("sweep.parameter");
  static const std::map<std::string, std::string> kTarget = {
      {"n", "tree.edges"}, {"q", "coloring.q"}, {"delta", "tree.delta"}, {"ell", "tree.depth"}};
  const auto target = kTarget.find(param);
  if (target == kTarget.end()) throw ConfigError("sweep.parameter must be one of n, q, delta, ell");
  const auto values = ctx.cfg.list<int>("sweep.values");
  if (values.empty()) throw ConfigError("sweep.values is empty");
  const SpectralOptions opt = spectral_from(ctx.cfg);

  json j = base_record(ctx, nullptr);
  auto& rows = j["rows"] = json::array();
  CsvWriter csv(ctx.out_dir / "sweep.csv");
  csv.row({param, "tree_hash", "n", "q", "N", "t_rel", "t_rel_over_n"});
  std::vector<double> ratio;
  for (int v : values) {
    Config point = ctx.cfg;
    point.set(target->second, std::to_string(v));
    const Tree tree = tree_from(point);
    const ListSpec lists = lists_from(point, tree);
    const ChainSpec spec = chain_from(point, tree);
    const DistributionTable dist = enumerate_colorings(tree, lists, enumeration_cap(point));
    const double t_rel = trel_of(tree, lists, spec, dist, opt);
    const double n = static_cast<double>(tree.num_edges());
    ratio.push_back(t_rel / n);
    rows.push_back({{param, v},
                    {"tree_hash", tree.content_hash()},
                    {"n", tree.num_edges()},
                    {"q", lists.q()},
                    {"N", dist.size()},
                    {"t_rel", t_rel},
                    {"t_rel_over_n", t_rel / n}});
    csv.row({std::to_string(v), tree.content_hash(), std::to_string(tree.num_edges()), std::to_string(lists.q()),
             std::to_string(dist.size()), num(t_rel), num(t_rel / n)});
  }
  bool increasing = true;
  for (std::size_t i = 1; i < ratio.size(); ++i) increasing = increasing && ratio[i] > ratio[i - 1];
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  j["strictly_increasing"] = increasing;
  j["max_over_min"] = *hi / *lo;
  write_json(ctx, j);
  fmt::print("sweep {}: t_rel/n = [{}]\n", param, fmt::join(ratio, ", "));
  return 0;
}

const std::map<std::string, std::function<int(const Context&)>>& commands() {
  static const std::map<std::string, std::function<int(const Context&)>> table = {
      {"enumerate", cmd_enumerate},     {"count", cmd_count},         {"gap", cmd_gap},
      {"mix", cmd_mix},                 {"conductance", cmd_conductance}, {"lowerbound", cmd_lowerbound},
      {"congestion", cmd_congestion},   {"tensorize", cmd_tensorize}, {"induction", cmd_induction},
      {"star_analysis", cmd_star_analysis}, {"sweep", cmd_sweep},
  };
  return table;
}

}  // namespace
}  // namespace treecolor::cli

int main(int argc, char** argv) {
  using namespace treecolor;
  using namespace treecolor::cli;

  CLI::App app{"Exact verification harness for edge-coloring chains on trees"};
  std::string command, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::vector<std::string> names;
  for (const auto& [name, fn] : commands()) names.push_back(name);
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "INI config file")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--seed", seed, "RNG seed (overrides run.seed)");
  app.add_option("--jobs", jobs, "Worker cap (overrides run.jobs)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Context ctx{command, Config::load(config_path), {}, 0, 1};
    if (ctx.cfg.has("command") && ctx.cfg.require<std::string>("command") != command)
      throw ConfigError("config is for command '" + ctx.cfg.require<std::string>("command") + "'");
    if (!out_dir.empty()) ctx.cfg.set("output.dir", out_dir);
    if (seed) ctx.cfg.set("run.seed", std::to_string(*seed));
    if (jobs) ctx.cfg.set("run.jobs", std::to_string(*jobs));
    ctx.out_dir = ctx.cfg.get("output.dir", "out");
    ctx.seed = ctx.cfg.get<std::uint64_t>("run.seed", 0);
    ctx.jobs = ctx.cfg.get<int>("run.jobs", 1);
    if (ctx.jobs < 1) throw ConfigError("run.jobs must be >= 1");
    fs::create_directories(ctx.out_dir);
    return commands().at(command)(ctx);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const ParameterError& e) {
    fmt::print(stderr, "parameter error: {}\n", e.what());
    return 2;
  } catch (const UnsupportedRegime& e) {
    fmt::print(stderr, "unsupported regime: {}\n", e.what());
    return 2;
  } catch (const InfeasiblePinning& e) {
    fmt::print(stderr, "infeasible pinning: {}\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    fmt::print(stderr, "domain error: {}\n", e.what());
    return 2;
  } catch (const CapacityError& e) {
    fmt::print(stderr, "capacity error: {}\n", e.what());
    return 3;
  } catch (const VerificationFailure& e) {
    fmt::print(stderr, "verification failure: {}\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
