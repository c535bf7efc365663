#pragma once

// Command-line front end: one subcommand per analysis, text or JSON-lines output.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "treematroid/lasso.hpp"
#include "treematroid/matroid.hpp"
#include "treematroid/reconstruct.hpp"
#include "treematroid/stargraph.hpp"
#include "treematroid/tree.hpp"

namespace treematroid::cli {

enum ExitCode : int { ok = 0, negative = 1, usage = 2, scale = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Cord file: one "label1 label2" pair per line; '#' starts a comment.
inline CordSet parse_cords(const XTree& t, const std::string& text) {
  CordSet out;
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string x; words >> x;) w.push_back(x);
    if (w.empty()) continue;
    if (w.size() != 2) throw UsageError("line " + std::to_string(number) + ": expected two leaf labels");
    const auto a = t.find_leaf(w[0]), b = t.find_leaf(w[1]);
    if (!a || !b)
      throw UsageError("line " + std::to_string(number) + ": unknown leaf '" + (a ? w[1] : w[0]) + "'");
    if (*a == *b) throw UsageError("line " + std::to_string(number) + ": a cord needs two distinct leaves");
    out.insert(Cord(*a, *b));
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Settings {
  std::string tree_file;
  std::string newick;
  std::string cords_file;
  std::string oracle_from;
  std::string labels;
  std::string split;
  std::string leaf;
  bool json = false;
  bool count = false;
  bool parallel = false;
  bool strict_pendant = false;
  std::size_t max_leaves = 0;
  std::size_t max_size = 0;
  std::uint32_t edge_id = 0;
  const CLI::App* chosen = nullptr;

  bool given(const std::string& option) const { return chosen && chosen->count(option) > 0; }
};

class Runner {
 public:
  Runner(const Settings& s, std::ostream& out) : s_(s), out_(out) {}

  std::size_t bound(std::size_t fallback) const {
    if (s_.given("--max-leaves")) return s_.max_leaves;
    if (const char* env = std::getenv("LASSO_MATROID_MAX_LEAVES"); env && *env) {
      try {
        return std::stoul(env);
      } catch (const std::exception&) {
        throw UsageError("LASSO_MATROID_MAX_LEAVES must be a number");
      }
    }
    return fallback;
  }

  EnumerationOptions enumeration(std::size_t fallback) const {
    EnumerationOptions o;
    o.max_leaves = bound(fallback);
    if (s_.parallel) o.threads = std::max(2u, std::thread::hardware_concurrency());
    return o;
  }

  XTree tree() const {
    if (!s_.tree_file.empty() && !s_.newick.empty()) throw UsageError("give either --tree or --newick, not both");
    if (!s_.tree_file.empty()) return parse_newick_tree(read_file(s_.tree_file));
    if (!s_.newick.empty()) return parse_newick_tree(s_.newick);
    throw UsageError("a tree is required (--tree FILE or --newick STRING)");
  }

  CordSet cords(const XTree& t) const {
    if (s_.cords_file.empty()) throw UsageError("a cord set is required (--cords FILE)");
    return parse_cords(t, read_file(s_.cords_file));
  }

  // Output.

  nlohmann::json json_cords(const XTree& t, const CordSet& cords) const {
    auto arr = nlohmann::json::array();
    for (const auto& c : cords) arr.push_back({t.label(c.a), t.label(c.b)});
    return arr;
  }

  nlohmann::json json_leaves(const XTree& t, const std::vector<Leaf>& leaves) const {
    auto arr = nlohmann::json::array();
    for (const Leaf x : leaves) arr.push_back(t.label(x));
    return arr;
  }

  static std::string text_leaves(const XTree& t, const std::vector<Leaf>& leaves) {
    std::string s = "{";
    for (std::size_t i = 0; i < leaves.size(); ++i) s += (i ? ", " : "") + t.label(leaves[i]);
    return s + "}";
  }

  static std::string text_flag(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : "undecided"; }
  static nlohmann::json json_flag(const std::optional<bool>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

  void record(const nlohmann::json& j) const { out_ << j.dump() << '\n'; }

  // Streams sets, or just their number under --count.
  void emit_sets(const XTree& t, const std::string& key, const std::function<void(const CordCallback&)>& produce) const {
    std::size_t n = 0;
    produce([&](const CordSet& s) {
      ++n;
      if (s_.count) return;
      if (s_.json)
        record({{key, json_cords(t, s)}});
      else
        out_ << format_cords(t, s) << '\n';
    });
    if (s_.count) {
      if (s_.json)
        record({{"count", n}});
      else
        out_ << n << '\n';
    }
  }

  // Subcommands.

  int rank() const {
    const auto t = tree();
    const auto r = rank_of(t, cords(t));
    if (s_.json)
      record({{"rank", r}, {"edges", t.edge_count()}});
    else
      out_ << "rank: " << r << '\n';
    return ok;
  }

  int verdict() const {
    const auto t = tree();
    const auto v = treematroid::verdict(t, cords(t));
    if (s_.json) {
      record({{"rank", v.rank}, {"independent", v.independent}, {"lasso", v.lasso}, {"basis", v.basis}});
    } else {
      out_ << "rank: " << v.rank << "\nindependent: " << text_flag(v.independent) << "\nlasso: " << text_flag(v.lasso)
           << "\nbasis: " << text_flag(v.basis) << '\n';
    }
    return ok;
  }

  int closure() const {
    const auto t = tree();
    const auto c = treematroid::closure(t, cords(t));
    if (s_.json)
      record({{"closure", json_cords(t, c)}});
    else
      out_ << format_cords(t, c) << '\n';
    return ok;
  }

  int bases() const {
    const auto t = tree();
    const TreeMatroid m(t);
    const auto o = enumeration(7);
    emit_sets(t, "basis", [&](const CordCallback& cb) { m.for_each_basis(cb, o); });
    return ok;
  }

  int circuits() const {
    const auto t = tree();
    const TreeMatroid m(t);
    const std::size_t size = s_.given("--max-size") ? s_.max_size : t.edge_count() + 1;
    const auto all = m.circuits(size, enumeration(7));
    emit_sets(t, "circuit", [&](const CordCallback& cb) {
      for (const auto& c : all) cb(c);
    });
    return ok;
  }

  int coloops() const {
    const auto t = tree();
    const auto c = treematroid::coloops(t);
    if (s_.json)
      record({{"coloops", json_cords(t, c)}});
    else
      out_ << format_cords(t, c) << '\n';
    return ok;
  }

  int star() const {
    const auto t = tree();
    const auto l = cords(t);
    const std::size_t n = t.leaf_count();
    const auto report = analyze(n, l);
    const std::size_t oracle = rank_of(star_tree(t.labels()), l);
    if (s_.json) {
      auto comps = nlohmann::json::array();
      for (const auto& c : report.components)
        comps.push_back({{"vertices", json_leaves(t, c.vertices)},
                         {"edges", json_cords(t, c.edges)},
                         {"bipartite", c.bipartite},
                         {"cycles", c.cycle_count}});
      record({{"rank", star_rank(n, l)},
              {"oracle_rank", oracle},
              {"lasso", star_is_lasso(n, l)},
              {"independent", star_is_independent(n, l)},
              {"basis", star_is_basis(n, l)},
              {"circuit", star_is_circuit(n, l)},
              {"closure", json_cords(t, star_closure(n, l))},
              {"components", comps}});
    } else {
      out_ << "rank: " << star_rank(n, l) << "\noracle_rank: " << oracle << "\nlasso: " << text_flag(star_is_lasso(n, l))
           << "\nindependent: " << text_flag(star_is_independent(n, l)) << "\nbasis: " << text_flag(star_is_basis(n, l))
           << "\ncircuit: " << text_flag(star_is_circuit(n, l)) << "\nclosure: " << format_cords(t, star_closure(n, l))
           << '\n';
      for (const auto& c : report.components)
        out_ << "component: " << text_leaves(t, c.vertices) << " bipartite: " << text_flag(c.bipartite)
             << " cycles: " << c.cycle_count << '\n';
    }
    return ok;
  }

  EdgeId chosen_edge(const XTree& t) const {
    const bool by_id = s_.given("--edge-id"), by_split = !s_.split.empty();
    if (by_id == by_split) throw UsageError("give exactly one of --edge-id or --split");
    if (by_id) return EdgeId{s_.edge_id};
    const auto sides = split_list(s_.split, '|');
    if (sides.size() != 2) throw UsageError("--split expects 'a,b|c,d,...'");
    std::vector<bool> in_a(t.leaf_count(), false);
    std::vector<int> seen(t.leaf_count(), 0);
    for (std::size_t side = 0; side < 2; ++side)
      for (const auto& label : split_list(sides[side], ',')) {
        const auto x = t.find_leaf(label);
        if (!x) throw UsageError("unknown leaf '" + label + "' in --split");
        ++seen[*x];
        in_a[*x] = side == 0;
      }
    if (std::any_of(seen.begin(), seen.end(), [](int k) { return k != 1; }))
      throw UsageError("--split must partition the leaf set");
    for (std::size_t p = 0; p < t.edge_count(); ++p) {
      if (!t.is_interior_edge(p)) continue;
      const auto& e = t.edge(p);
      const auto side = leaf_branches(t, e.u);
      std::size_t toward_v = 0;
      const auto& around = t.incidences(e.u);
      for (std::size_t i = 0; i < around.size(); ++i)
        if (around[i].edge == p) toward_v = i;
      bool match_same = true, match_flip = true;
      for (Leaf x = 0; x < t.leaf_count(); ++x) {
        const bool far = side[x] == toward_v;
        if (far != in_a[x]) match_same = false;
        if (far == in_a[x]) match_flip = false;
      }
      if (match_same || match_flip) return e.id;
    }
    throw UsageError("no interior edge induces the split " + s_.split);
  }

  int contract_bases() const {
    const auto t = tree();
    const EdgeId f = chosen_edge(t);
    const auto o = enumeration(7);
    const auto from_contraction = contraction_bases(t, f, o);
    const auto direct = TreeMatroid(t).bases(o);
    const bool equal = from_contraction == direct;
    emit_sets(t, "basis", [&](const CordCallback& cb) {
      for (const auto& b : from_contraction) cb(b);
    });
    if (s_.json)
      record({{"edge", to_underlying(f)}, {"count", from_contraction.size()}, {"equals_bases", equal}});
    else
      out_ << "equals_bases: " << text_flag(equal) << '\n';
    return equal ? ok : negative;
  }

  int pointed_covers() const {
    const auto t = tree();
    if (s_.leaf.empty()) throw UsageError("--leaf is required");
    const auto covers = treematroid::pointed_covers(t, t.leaf(s_.leaf));
    emit_sets(t, "cover", [&](const CordCallback& cb) {
      for (const auto& c : covers) cb(c);
    });
    return ok;
  }

  int lasso() const {
    const auto t = tree();
    const auto l = cords(t);
    TopologyOptions o;
    o.max_leaves = bound(6);
    o.strict_pendant = s_.strict_pendant;
    const auto r = lasso_report(t, l, TopologicalDecider(o));
    if (s_.json) {
      nlohmann::json j{{"rank", r.rank},
                       {"edge_weight", r.edge_weight},
                       {"topological", json_flag(r.topological)},
                       {"strong", json_flag(r.strong)},
                       {"bipartition", nullptr}};
      if (r.bipartition) j["bipartition"] = nlohmann::json::array({json_leaves(t, r.bipartition->first), json_leaves(t, r.bipartition->second)});
      if (!r.topology_note.empty()) j["note"] = r.topology_note;
      record(j);
    } else {
      out_ << "rank: " << r.rank << "\nedge_weight: " << text_flag(r.edge_weight)
           << "\ntopological: " << text_flag(r.topological) << "\nstrong: " << text_flag(r.strong) << '\n';
      if (r.bipartition)
        out_ << "bipartition: " << text_leaves(t, r.bipartition->first) << " | " << text_leaves(t, r.bipartition->second)
             << '\n';
      if (!r.topology_note.empty()) out_ << "note: " << r.topology_note << '\n';
    }
    if (!r.strong) return scale;
    return *r.strong ? ok : negative;
  }

  int quartets() const {
    const auto t = tree();
    for (const auto& q : quartet_set_from_oracle(rank_oracle(t), t.leaf_count())) {
      if (s_.json)
        record({{"quartet", nlohmann::json::array({nlohmann::json::array({t.label(q.left.a), t.label(q.left.b)}),
                                                  nlohmann::json::array({t.label(q.right.a), t.label(q.right.b)})})}});
      else
        out_ << t.label(q.left.a) << ',' << t.label(q.left.b) << '|' << t.label(q.right.a) << ',' << t.label(q.right.b)
             << '\n';
    }
    return ok;
  }

  int reconstruct() const {
    if (s_.oracle_from.empty()) throw UsageError("--oracle-from NEWICK is required");
    const auto source = parse_newick_tree(s_.oracle_from);
    const auto rebuilt = tree_from_oracle(rank_oracle(source), source.labels(), bound(6));
    const bool same = are_equivalent(source, rebuilt);
    if (s_.json)
      record({{"newick", to_newick(rebuilt)}, {"equivalent", same}});
    else
      out_ << to_newick(rebuilt) << '\n';
    return same ? ok : negative;
  }

  int binary_check() const {
    const auto t = tree();
    const auto witness = nonbinary_witness(t);
    const auto check = is_binary_matroid(t, bound(6));
    if (s_.json) {
      nlohmann::json j{{"binary", check.binary}, {"circuits", check.circuit_count}, {"violation", nullptr}, {"witness", nullptr}};
      if (check.violation) j["violation"] = {json_cords(t, check.violation->first), json_cords(t, check.violation->second)};
      if (witness)
        j["witness"] = {{"first", json_cords(t, witness->first)},
                        {"second", json_cords(t, witness->second)},
                        {"difference", json_cords(t, witness->difference)},
                        {"confirmed", witness->confirmed()}};
      record(j);
    } else {
      out_ << "binary: " << text_flag(check.binary) << "\ncircuits: " << check.circuit_count << '\n';
      if (check.violation)
        out_ << "violation: " << format_cords(t, check.violation->first) << ' '
             << format_cords(t, check.violation->second) << '\n';
      if (witness)
        out_ << "witness: " << format_cords(t, witness->first) << ' ' << format_cords(t, witness->second)
             << " confirmed: " << text_flag(witness->confirmed()) << '\n';
    }
    return check.binary ? ok : negative;
  }

  int enumerate_trees() const {
    const auto labels = split_list(s_.labels, ',');
    if (labels.empty()) throw UsageError("--labels a,b,c,... is required");
    const auto trees = enumerate_xtrees(labels, bound(8));
    if (s_.count) {
      if (s_.json)
        record({{"count", trees.size()}});
      else
        out_ << trees.size() << '\n';
      return ok;
    }
    for (const auto& t : trees) {
      if (s_.json)
        record({{"newick", to_newick(t)}});
      else
        out_ << to_newick(t) << '\n';
    }
    return ok;
  }

 private:
  const Settings& s_;
  std::ostream& out_;
};

/// Runs one invocation; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank oracle, bases, circuits and lassos of the matroid of an X-tree", "lasso-matroid"};
  app.require_subcommand(1);
  Settings s;
  Runner runner(s, out);
  std::function<int()> action;

  auto tree_options = [&](CLI::App* sub) {
    sub->add_option("--tree", s.tree_file, "Newick file");
    sub->add_option("--newick", s.newick, "Newick string");
  };
  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", s.json, "One JSON object per output line");
    sub->add_option("--max-leaves", s.max_leaves, "Leaf bound for brute-force steps");
  };
  struct Entry {
    const char* name;
    const char* help;
    bool tree;
    bool cords;
    int (Runner::*handler)() const;
  };
  const std::vector<Entry> entries{
      {"rank", "Rank of a cord set", true, true, &Runner::rank},
      {"verdict", "Rank, independence, lasso and basis flags", true, true, &Runner::verdict},
      {"closure", "Closure of a cord set", true, true, &Runner::closure},
      {"bases", "Every basis", true, false, &Runner::bases},
      {"circuits", "Every circuit up to a size", true, false, &Runner::circuits},
      {"coloops", "Cords in every basis", true, false, &Runner::coloops},
      {"star", "Graph characterizations on the star tree over the same leaves", true, true, &Runner::star},
      {"contract-bases", "Bases rebuilt from a single-edge contraction", true, false, &Runner::contract_bases},
      {"pointed-covers", "Pointed covers at a leaf", true, false, &Runner::pointed_covers},
      {"lasso", "Edge-weight, topological and strong lasso report", true, true, &Runner::lasso},
      {"quartets", "Quartets read from rank queries", true, false, &Runner::quartets},
      {"reconstruct", "Rebuild a tree from its rank oracle", false, false, &Runner::reconstruct},
      {"binary-check", "Whether the matroid is binary", true, false, &Runner::binary_check},
      {"enumerate-trees", "Every X-tree on the given labels", false, false, &Runner::enumerate_trees},
  };
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    if (e.tree) tree_options(sub);
    if (e.cords) sub->add_option("--cords", s.cords_file, "Cord file: 'label1 label2' per line");
    common(sub);
    const std::string name = e.name;
    if (name == "bases" || name == "circuits" || name == "pointed-covers" || name == "enumerate-trees" ||
        name == "contract-bases")
      sub->add_flag("--count", s.count, "Print only the number of results");
    if (name == "bases" || name == "contract-bases") sub->add_flag("--parallel", s.parallel, "Partitioned enumeration");
    if (name == "circuits") sub->add_option("--max-size", s.max_size, "Largest circuit size");
    if (name == "contract-bases") {
      sub->add_option("--edge-id", s.edge_id, "Interior edge id");
      sub->add_option("--split", s.split, "Interior edge by its split, 'a,b|c,d,...'");
    }
    if (name == "pointed-covers") sub->add_option("--leaf", s.leaf, "The point x");
    if (name == "lasso") sub->add_flag("--strict-pendant", s.strict_pendant, "Require positive pendant weights");
    if (name == "reconstruct") sub->add_option("--oracle-from", s.oracle_from, "Newick of the tree behind the oracle");
    if (name == "enumerate-trees") sub->add_option("--labels", s.labels, "Comma-separated leaf labels");
    const auto handler = e.handler;
    sub->callback([&, sub, handler] {
      s.chosen = sub;
      action = [&, handler] { return (runner.*handler)(); };
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return usage;
  } catch (const ScaleError& e) {
    err << "scale bound exceeded: " << e.what() << '\n';
    return scale;
  } catch (const ReconstructionError& e) {
    err << "reconstruction failed: " << e.what() << '\n';
    return negative;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
}

}  // namespace treematroid::cli
