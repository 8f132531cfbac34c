// Command-line surface for batch use: kernelization, exact TBR distance,
// tight-family generation and verification, generator enumeration, display
// checks, and parsimony bounds. Exit codes: 0 success, 1 property violation
// or failed verification, 2 parse error, 3 budget exhausted.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tbrkit/errors.hpp"
#include "tbrkit/families.hpp"
#include "tbrkit/network.hpp"
#include "tbrkit/newick.hpp"
#include "tbrkit/parsimony.hpp"
#include "tbrkit/reduce.hpp"
#include "tbrkit/rooted.hpp"
#include "tbrkit/tbr.hpp"

using namespace tbrkit;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Report {
  json body;
  std::string path;

  Report() { body["results"] = json::object(); }
  void input(const std::string& name, const std::string& file) {
    body["inputs"][name] = {{"path", file}, {"digest", fnv1a(read_file(file))}};
  }
  void set(const std::string& key, const json& value) { body["results"][key] = value; }
  void finish(int exit_code) {
    body["exit"] = exit_code;
    if (!path.empty()) write_file(path, body.dump(2) + "\n");
  }
};

UnrootedTree load_tree(const std::string& path) {
  return read_newick_file(path, true).at(0);
}

RuleSet parse_rules(const std::string& text) {
  RuleSet rules;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    if (cur == "subtree")
      rules.insert(Rule::Subtree);
    else if (cur == "chain")
      rules.insert(Rule::Chain);
    else if (cur == "cluster")
      rules.insert(Rule::Cluster);
    else
      throw InvalidArgument("unknown rule '" + cur + "'");
    cur.clear();
  };
  for (char c : text) {
    if (c == ',')
      flush();
    else
      cur += c;
  }
  flush();
  if (rules.empty()) throw InvalidArgument("no rules given");
  return rules;
}

void print_verify_report(const VerifyReport& rep) {
  for (const auto& item : rep.items)
    std::printf("  [%s] %s%s%s\n", item.pass ? "pass" : "FAIL", item.name.c_str(),
                item.detail.empty() ? "" : ": ", item.detail.c_str());
}

int cmd_kernelize(const std::string& in1, const std::string& in2,
                  const std::string& rules_text, const std::string& out_dir, bool solve,
                  std::uint64_t budget, Report& report) {
  UnrootedTree t1 = load_tree(in1);
  UnrootedTree t2 = load_tree(in2);
  RuleSet rules = parse_rules(rules_text);
  KernelResult kr = kernelize(t1, t2, rules);

  std::printf("leaves before: %d\n", t1.leaf_count());
  std::printf("leaves after:  %d\n", kr.t1.leaf_count());
  std::printf("steps: %zu%s\n", kr.trace.steps.size(),
              kr.trace.steps.empty() ? " (already reduced)" : "");
  report.set("leaves_before", t1.leaf_count());
  report.set("leaves_after", kr.t1.leaf_count());
  report.set("steps", kr.trace.steps.size());

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_newick_file(out_dir + "/s.nwk", {kr.t1});
    write_newick_file(out_dir + "/s_prime.nwk", {kr.t2});
    write_file(out_dir + "/trace.log", serialize_trace(kr.trace));
    report.set("out_dir", out_dir);
  }
  if (solve) {
    SolveOptions so;
    so.max_nodes = budget;
    SolveResult before = tbr_distance_maf(t1, t2, so);
    SolveResult after = tbr_distance_maf(kr.t1, kr.t2, so);
    if (!before.exact || !after.exact) {
      std::printf("solver budget exhausted\n");
      return kExitBudget;
    }
    std::printf("distance before: %d\n", before.distance);
    std::printf("distance after:  %d\n", after.distance);
    report.set("distance_before", before.distance);
    report.set("distance_after", after.distance);
    bool subtree_chain =
        rules.count(Rule::Subtree) && rules.count(Rule::Chain) && !rules.count(Rule::Cluster);
    if (before.distance != after.distance) {
      std::printf("VIOLATION: reduction changed the distance\n");
      return kExitViolation;
    }
    if (subtree_chain && after.distance >= 2 &&
        kr.t1.leaf_count() > 15 * after.distance - 9) {
      std::printf("VIOLATION: kernel exceeds 15k-9\n");
      return kExitViolation;
    }
    std::printf("kernel bound 15k-9: %d leaves <= %d\n", kr.t1.leaf_count(),
                after.distance >= 2 ? 15 * after.distance - 9 : kr.t1.leaf_count());
  }
  return kExitOk;
}

int cmd_tbr(const std::string& in1, const std::string& in2, const std::string& method,
            std::uint64_t budget, int max_k, const std::string& witness_path,
            const std::string& cert_path, Report& report) {
  UnrootedTree t1 = load_tree(in1);
  UnrootedTree t2 = load_tree(in2);
  if (method == "bfs") {
    auto d = tbr_distance_bfs(t1, t2, max_k);
    if (!d) {
      std::printf("distance exceeds max-k %d\n", max_k);
      report.set("distance", nullptr);
      return kExitBudget;
    }
    std::printf("distance %d\n", *d);
    report.set("distance", *d);
    return kExitOk;
  }

  SolveOptions so;
  so.max_nodes = budget;
  DistanceCertificate cert = tbr_distance(t1, t2, so);
  std::printf("distance %d\n", cert.distance);
  std::printf("kernel leaves %d, forest components %zu, trace steps %zu\n",
              cert.kernel1.leaf_count(), cert.solve.forest.components.size(),
              cert.trace.steps.size());
  report.set("distance", cert.distance);
  report.set("kernel_leaves", cert.kernel1.leaf_count());
  if (!cert_path.empty()) {
    write_file(cert_path, serialize_certificate(cert) + "trace\n" +
                              serialize_trace(cert.trace));
    report.set("certificate", cert_path);
  }

  if (method == "sandwich") {
    MpLowerBound lb = mp_lower_bound(t1, t2);
    std::printf("parsimony lower bound %d\n", lb.bound);
    report.set("mp_lower_bound", lb.bound);
    if (lb.bound > cert.distance) {
      std::printf("VIOLATION: lower bound exceeds the distance\n");
      return kExitViolation;
    }
    if (!witness_path.empty()) {
      UnrootedNetwork witness = parse_unet(read_file(witness_path));
      int r = reticulation_number(witness);
      bool shows = displays(witness, t1).displayed && displays(witness, t2).displayed;
      std::printf("witness r %d, displays both: %s\n", r, shows ? "yes" : "no");
      report.set("witness_r", r);
      report.set("witness_displays", shows);
      if (shows && cert.distance > r) {
        std::printf("VIOLATION: distance exceeds a displaying witness's r\n");
        return kExitViolation;
      }
    }
  }
  return kExitOk;
}

int cmd_family(const std::string& variant, int k, const std::string& out_dir,
               Report& report) {
  TightInstance inst = variant == "sc" ? build_sc(k) : build_scc(k);
  write_instance(out_dir, inst);
  std::printf("wrote %s family, k=%d, %d taxa -> %s\n", variant.c_str(), k,
              inst.s.leaf_count(), out_dir.c_str());
  report.set("variant", variant);
  report.set("k", k);
  report.set("leaves", inst.s.leaf_count());
  report.set("out_dir", out_dir);
  return kExitOk;
}

int cmd_verify(const std::string& dir, Report& report) {
  TightInstance inst = read_instance(dir);
  VerifyReport rep = verify_instance(inst);
  std::printf("verifying %s (k=%d, %d taxa)\n",
              inst.variant == FamilyVariant::SC ? "sc" : "scc", inst.k,
              inst.s.leaf_count());
  print_verify_report(rep);
  json items = json::array();
  for (const auto& i : rep.items)
    items.push_back({{"name", i.name}, {"pass", i.pass}, {"detail", i.detail}});
  report.set("checks", items);
  report.set("all_pass", rep.all_pass());
  if (!rep.all_pass()) {
    std::printf("FAILED: %s\n", rep.first_failure()->name.c_str());
    return kExitViolation;
  }
  std::printf("all checks passed\n");
  return kExitOk;
}

int cmd_generators(int k, int cap, Report& report) {
  auto gens = enumerate_generators(k, cap);
  std::printf("%zu generator(s) for k=%d\n", gens.size(), k);
  for (const auto& g : gens) {
    if (k >= 2 && count_sides(g) != 3 * (k - 1)) {
      std::printf("VIOLATION: side count mismatch\n");
      return kExitViolation;
    }
  }
  if (k >= 2) std::printf("every generator has %d sides\n", 3 * (k - 1));
  report.set("k", k);
  report.set("count", gens.size());
  return kExitOk;
}

int cmd_display(const std::string& net_path, const std::string& tree_path,
                Report& report) {
  UnrootedNetwork net = parse_unet(read_file(net_path));
  UnrootedTree tree = load_tree(tree_path);
  DisplayResult res = displays(net, tree);
  std::printf("displays: %s\n", res.displayed ? "yes" : "no");
  report.set("displays", res.displayed);
  if (res.displayed) {
    std::printf("subdivision edges %zu, spanning edges %zu\n",
                res.witness.subdivision.size(), res.witness.spanning.size());
    for (const Edge& e : res.witness.subdivision)
      std::printf("D %d %d\n", e.a, e.b);
    report.set("subdivision_edges", res.witness.subdivision.size());
  }
  return res.displayed ? kExitOk : kExitViolation;
}

int cmd_mp(const std::string& in1, const std::string& in2, bool exhaustive,
           const std::string& char_path, Report& report) {
  UnrootedTree t1 = load_tree(in1);
  UnrootedTree t2 = load_tree(in2);
  MpLowerBound lb = mp_lower_bound(t1, t2, exhaustive);
  std::printf("parsimony lower bound %d\n", lb.bound);
  report.set("mp_lower_bound", lb.bound);
  if (!char_path.empty()) {
    write_file(char_path, serialize_character(lb.witness));
    report.set("character", char_path);
  }
  return kExitOk;
}

int cmd_rooted_verify(const std::string& dir, Report& report) {
  RootedCandidate cand = read_rooted_candidate(dir);
  VerifyReport rep = verify_rooted_family(cand);
  std::printf("verifying rooted candidate (k=%d, %d taxa%s)\n", cand.k,
              cand.s.leaf_count(), cand.cluster_reduced ? ", cluster reduced" : "");
  print_verify_report(rep);
  report.set("all_pass", rep.all_pass());
  if (!rep.all_pass()) {
    std::printf("FAILED: %s\n", rep.first_failure()->name.c_str());
    return kExitViolation;
  }
  std::printf("all checks passed\n");
  return kExitOk;
}

int cmd_rooted_candidate(bool cluster_reduced, std::uint64_t seed,
                         const std::string& out_dir, Report& report) {
  RootedCandidate cand = build_rooted_candidate(cluster_reduced, seed);
  write_rooted_candidate(out_dir, cand);
  std::printf("wrote rooted candidate, k=1, %d taxa -> %s\n", cand.s.leaf_count(),
              out_dir.c_str());
  report.set("leaves", cand.s.leaf_count());
  report.set("out_dir", out_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tbrkit: kernelization and exact solving for TBR distance"};
  app.require_subcommand(1);

  std::string in1, in2, out_dir, rules = "subtree,chain", method = "maf";
  std::string net_path, tree_path, witness_path, cert_path, char_path, report_path;
  std::string variant;
  bool solve = false, exhaustive = false, cluster_reduced = false;
  std::uint64_t budget = 10'000'000, seed = 1;
  int k = 2, max_k = 10, gen_cap = 4;

  auto* kern = app.add_subcommand("kernelize", "apply reduction rules to a tree pair");
  kern->add_option("in1", in1)->required();
  kern->add_option("in2", in2)->required();
  kern->add_option("--rules", rules, "comma list: subtree,chain,cluster");
  kern->add_option("--out", out_dir, "directory for reduced trees and trace");
  kern->add_flag("--solve", solve, "cross-check the distance before and after");
  kern->add_option("--budget", budget, "solver node budget");
  kern->add_option("--report", report_path, "write a JSON report");

  auto* tbr = app.add_subcommand("tbr", "exact TBR distance");
  tbr->add_option("in1", in1)->required();
  tbr->add_option("in2", in2)->required();
  tbr->add_option("--method", method, "maf | bfs | sandwich");
  tbr->add_option("--budget", budget, "solver node budget");
  tbr->add_option("--max-k", max_k, "bfs depth cap");
  tbr->add_option("--witness", witness_path, "UNET network for the sandwich check");
  tbr->add_option("--certificate", cert_path, "write the certificate bundle");
  tbr->add_option("--report", report_path, "write a JSON report");

  auto* fam = app.add_subcommand("family", "build a tight instance");
  fam->add_option("variant", variant, "sc | scc")->required();
  fam->add_option("--k", k, "target distance")->required();
  fam->add_option("--out", out_dir, "output directory")->required();
  fam->add_option("--report", report_path, "write a JSON report");

  auto* ver = app.add_subcommand("verify", "re-verify a tight instance directory");
  ver->add_option("dir", in1)->required();
  ver->add_option("--report", report_path, "write a JSON report");

  auto* gens = app.add_subcommand("generators", "enumerate k-generators");
  gens->add_option("--k", k)->required();
  gens->add_option("--max-k", gen_cap, "enumeration cap");
  gens->add_option("--report", report_path, "write a JSON report");

  auto* disp = app.add_subcommand("display", "does a network display a tree?");
  disp->add_option("net", net_path)->required();
  disp->add_option("tree", tree_path)->required();
  disp->add_option("--report", report_path, "write a JSON report");

  auto* mp = app.add_subcommand("mp", "maximum parsimony lower bound");
  mp->add_option("in1", in1)->required();
  mp->add_option("in2", in2)->required();
  mp->add_flag("--exhaustive", exhaustive, "scan all binary characters (small n)");
  mp->add_option("--character", char_path, "write the witness character");
  mp->add_option("--report", report_path, "write a JSON report");

  auto* rver = app.add_subcommand("rooted-verify", "verify a rooted candidate directory");
  rver->add_option("dir", in1)->required();
  rver->add_option("--report", report_path, "write a JSON report");

  auto* rcand = app.add_subcommand("rooted-candidate", "search a k=1 rooted candidate");
  rcand->add_flag("--cluster-reduced", cluster_reduced);
  rcand->add_option("--seed", seed);
  rcand->add_option("--out", out_dir)->required();
  rcand->add_option("--report", report_path, "write a JSON report");

  CLI11_PARSE(app, argc, argv);

  Report report;
  report.path = report_path;
  {
    std::string echo;
    for (int i = 1; i < argc; ++i) {
      if (i > 1) echo += " ";
      echo += argv[i];
    }
    report.body["command"] = echo;
  }

  int code = kExitOk;
  try {
    if (*kern) {
      report.input("in1", in1);
      report.input("in2", in2);
      code = cmd_kernelize(in1, in2, rules, out_dir, solve, budget, report);
    } else if (*tbr) {
      report.input("in1", in1);
      report.input("in2", in2);
      code = cmd_tbr(in1, in2, method, budget, max_k, witness_path, cert_path, report);
    } else if (*fam) {
      if (variant != "sc" && variant != "scc")
        throw InvalidArgument("variant must be sc or scc");
      code = cmd_family(variant, k, out_dir, report);
    } else if (*ver) {
      code = cmd_verify(in1, report);
    } else if (*gens) {
      code = cmd_generators(k, gen_cap, report);
    } else if (*disp) {
      code = cmd_display(net_path, tree_path, report);
    } else if (*mp) {
      code = cmd_mp(in1, in2, exhaustive, char_path, report);
    } else if (*rver) {
      code = cmd_rooted_verify(in1, report);
    } else if (*rcand) {
      code = cmd_rooted_candidate(cluster_reduced, seed, out_dir, report);
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    code = kExitParse;
  } catch (const BudgetExceeded& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    code = kExitBudget;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    code = kExitViolation;
  }
  report.finish(code);
  return code;
}
