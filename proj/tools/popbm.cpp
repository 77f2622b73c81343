// popbm: decide, construct and certify popular / weakly popular b-matchings.
//
// Exit codes: 0 = YES/found, 1 = NO/none, 2 = usage or input error,
// 3 = internal discrepancy (certifier and oracle disagree, or a translation
// postcondition fails on certified input).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "popbm/certifier.hpp"
#include "popbm/instance.hpp"
#include "popbm/matching.hpp"
#include "popbm/oracle.hpp"
#include "popbm/reductions.hpp"
#include "popbm/solvers.hpp"

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kInputError = 2;
constexpr int kDiscrepancy = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) popbm::fail(popbm::Errc::io_error, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) popbm::fail(popbm::Errc::io_error, "cannot write '" + path + "'");
  out << content;
}

std::vector<std::string> read_tokens(const std::string& path) {
  std::string text = read_file(path);
  std::vector<std::string> out;
  std::string cur;
  bool comment = false;
  for (char c : text) {
    if (c == '\n') comment = false;
    if (comment) continue;
    if (c == '#') {
      comment = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct VerifyArgs {
  std::string mode, instance_path, matching_path;
};

popbm::VerifyMode parse_mode(const std::string& mode) {
  if (mode == "popular") return popbm::VerifyMode::POPULAR;
  if (mode == "weak") return popbm::VerifyMode::WEAK;
  popbm::fail(popbm::Errc::bad_value, "--mode must be 'popular' or 'weak'");
}

std::string verdict_word(popbm::VerifyMode mode, bool holds) {
  if (mode == popbm::VerifyMode::POPULAR) return holds ? "POPULAR" : "NOT_POPULAR";
  return holds ? "WEAKLY_POPULAR" : "NOT_WEAKLY_POPULAR";
}

int run_verify(const VerifyArgs& args) {
  popbm::Instance inst = popbm::Instance::parse_text(read_file(args.instance_path));
  popbm::BMatching m = popbm::parse_matching_text(inst, read_file(args.matching_path));
  popbm::VerifyMode mode = parse_mode(args.mode);
  popbm::VerifyResult res = popbm::verify(inst, m, mode);
  std::cout << verdict_word(mode, res.holds) << '\n';
  if (res.witness) popbm::serialize_witness(inst, m, *res.witness, std::cout);
  return res.holds ? kYes : kNo;
}

struct BruteArgs {
  std::string mode, instance_path, matching_path;
  long long budget = 10'000'000;
};

int run_brute_check(const BruteArgs& args) {
  popbm::Instance inst = popbm::Instance::parse_text(read_file(args.instance_path));
  popbm::BMatching m = popbm::parse_matching_text(inst, read_file(args.matching_path));
  popbm::VerifyMode mode = parse_mode(args.mode);
  popbm::OracleMode omode =
      mode == popbm::VerifyMode::POPULAR ? popbm::OracleMode::POPULAR : popbm::OracleMode::WEAK;
  popbm::EnumOptions opts;
  opts.budget = args.budget;
  popbm::OracleVerdict oracle = popbm::brute_check(inst, m, omode, opts);
  popbm::VerifyResult cert = popbm::verify(inst, m, mode);
  if (oracle.holds != cert.holds) {
    std::cout << "DISCREPANCY\n";
    std::cout << "# oracle says " << (oracle.holds ? "holds" : "fails") << ", certifier says "
              << (cert.holds ? "holds" : "fails") << '\n';
    if (oracle.counterexample) {
      std::cout << "# oracle counterexample:\n";
      popbm::serialize_matching(inst, *oracle.counterexample, std::cout);
    }
    if (cert.witness) {
      std::cout << "# certifier witness:\n";
      popbm::serialize_witness(inst, m, *cert.witness, std::cout);
    }
    return kDiscrepancy;
  }
  std::cout << verdict_word(mode, oracle.holds) << '\n';
  if (oracle.counterexample) popbm::serialize_matching(inst, *oracle.counterexample, std::cout);
  return oracle.holds ? kYes : kNo;
}

int run_brute_find(const BruteArgs& args) {
  popbm::Instance inst = popbm::Instance::parse_text(read_file(args.instance_path));
  popbm::OracleMode omode = parse_mode(args.mode) == popbm::VerifyMode::POPULAR
                                ? popbm::OracleMode::POPULAR
                                : popbm::OracleMode::WEAK;
  popbm::EnumOptions opts;
  opts.budget = args.budget;
  auto found = popbm::brute_find(inst, omode, opts);
  if (!found) {
    std::cout << "NONE\n";
    return kNo;
  }
  std::cout << "FOUND\n";
  popbm::serialize_matching(inst, *found, std::cout);
  return kYes;
}

int run_solver(const std::string& instance_path, bool prime) {
  popbm::Instance inst = popbm::Instance::parse_text(read_file(instance_path));
  popbm::SolverReport report =
      prime ? popbm::algorithm_a_prime(inst) : popbm::algorithm_a(inst);
  if (!report.result) {
    std::cout << "NONE\n";
    for (const auto& line : report.trace) std::cout << "# trace: " << line << '\n';
    return kNo;
  }
  std::cout << "FOUND\n";
  popbm::serialize_report(inst, report, std::cout);
  return kYes;
}

int run_partition_match(const std::string& instance_path, const std::string& partition_path) {
  popbm::Instance inst = popbm::Instance::parse_text(read_file(instance_path));
  popbm::PartitionSpec spec = popbm::parse_partition_spec_text(inst, read_file(partition_path));
  popbm::CapGraph g = popbm::CapGraph::whole(inst);
  auto m = popbm::partition_matching(g, spec);
  if (!m) {
    std::cout << "NONE\n";
    return kNo;
  }
  std::cout << "FOUND\n";
  popbm::serialize_matching(inst, *m, std::cout);
  return kYes;
}

int run_eou(const std::string& instance_path, const std::string& matching_path) {
  popbm::Instance inst = popbm::Instance::parse_text(read_file(instance_path));
  popbm::CapGraph g = popbm::CapGraph::whole(inst);
  popbm::BMatching m = matching_path.empty()
                           ? popbm::max_b_matching(g)
                           : popbm::parse_matching_text(inst, read_file(matching_path));
  popbm::EouLabeling labels = popbm::eou_labels(g, m);
  auto word = [](popbm::EouLabel l) {
    return l == popbm::EouLabel::E ? "E" : l == popbm::EouLabel::O ? "O" : "U";
  };
  for (int a = 0; a < inst.agent_count(); ++a)
    std::cout << "agent " << inst.agent_name(a) << ' ' << word(labels.agent[a]) << '\n';
  for (int h = 0; h < inst.house_count(); ++h)
    std::cout << "house " << inst.house_name(h) << ' ' << word(labels.house[h]) << '\n';
  return kYes;
}

int run_reduce_x3c(const std::string& in_path, const std::string& out_path) {
  popbm::X3CInstance x = popbm::parse_x3c_text(read_file(in_path));
  popbm::X3CGadget g = popbm::build_x3c_gadget(x);
  std::string text = g.instance.to_text();
  write_file(out_path, text);
  std::ostringstream sidecar;
  popbm::write_x3c_sidecar(g, sidecar);
  write_file(out_path + ".map", sidecar.str());
  std::cout << text;
  return kYes;
}

int run_reduce_3sat(const std::string& in_path, const std::string& out_path) {
  popbm::CnfFormula f = popbm::parse_dimacs_text(read_file(in_path));
  popbm::SatGadget g = popbm::build_3sat_gadget(f);
  std::string text = g.instance.to_text();
  write_file(out_path, text);
  std::ostringstream sidecar;
  popbm::write_sat_sidecar(g, sidecar);
  write_file(out_path + ".map", sidecar.str());
  std::cout << text;
  return kYes;
}

struct TranslateArgs {
  std::string source_path;   // x3c or cnf file
  std::string cover_path;    // forward input (cover / assignment)
  std::string matching_path; // reverse input
  std::string out_path;
};

int run_translate_cover(const TranslateArgs& args) {
  popbm::X3CInstance x = popbm::parse_x3c_text(read_file(args.source_path));
  popbm::X3CGadget g = popbm::build_x3c_gadget(x);
  if (!args.cover_path.empty()) {
    std::vector<std::string> cover = read_tokens(args.cover_path);
    popbm::BMatching m = popbm::cover_to_matching(g, cover);
    popbm::VerifyResult res = popbm::verify(g.instance, m, popbm::VerifyMode::POPULAR);
    if (!res.holds)
      popbm::fail(popbm::Errc::discrepancy,
                  "cover matching rejected by the popularity certifier");
    std::string text = popbm::matching_to_text(g.instance, m);
    if (!args.out_path.empty()) write_file(args.out_path, text);
    std::cout << text;
    return kYes;
  }
  popbm::BMatching m = popbm::parse_matching_text(g.instance, read_file(args.matching_path));
  popbm::VerifyResult res = popbm::verify(g.instance, m, popbm::VerifyMode::POPULAR);
  if (!res.holds)
    popbm::fail(popbm::Errc::precondition, "matching is not popular for the gadget");
  std::vector<std::string> cover = popbm::matching_to_cover(g, m);
  std::ostringstream out;
  for (const auto& name : cover) out << name << '\n';
  if (!args.out_path.empty()) write_file(args.out_path, out.str());
  std::cout << out.str();
  return kYes;
}

std::vector<bool> parse_assignment_file(const std::string& path, int variable_count) {
  std::vector<std::string> tok = read_tokens(path);
  if (tok.size() % 2 != 0)
    popbm::fail(popbm::Errc::parse_error, "assignment file needs '<var> <0|1>' pairs");
  std::vector<bool> assignment(variable_count, false);
  std::vector<char> seen(variable_count, 0);
  for (size_t i = 0; i < tok.size(); i += 2) {
    int var = std::stoi(tok[i]);
    if (var < 1 || var > variable_count)
      popbm::fail(popbm::Errc::bad_value, "variable " + tok[i] + " out of range");
    if (tok[i + 1] != "0" && tok[i + 1] != "1")
      popbm::fail(popbm::Errc::bad_value, "assignment value must be 0 or 1");
    assignment[var - 1] = tok[i + 1] == "1";
    seen[var - 1] = 1;
  }
  for (int v = 0; v < variable_count; ++v)
    if (!seen[v])
      popbm::fail(popbm::Errc::bad_value, "variable " + std::to_string(v + 1) + " unassigned");
  return assignment;
}

int run_translate_assignment(const TranslateArgs& args) {
  popbm::CnfFormula f = popbm::parse_dimacs_text(read_file(args.source_path));
  popbm::SatGadget g = popbm::build_3sat_gadget(f);
  if (!args.cover_path.empty()) {
    std::vector<bool> assignment = parse_assignment_file(args.cover_path, f.variable_count);
    popbm::BMatching m = popbm::assignment_to_matching(g, assignment);
    popbm::VerifyResult res = popbm::verify(g.instance, m, popbm::VerifyMode::WEAK);
    if (!res.holds)
      popbm::fail(popbm::Errc::discrepancy,
                  "assignment matching rejected by the weak-popularity certifier");
    std::string text = popbm::matching_to_text(g.instance, m);
    if (!args.out_path.empty()) write_file(args.out_path, text);
    std::cout << text;
    return kYes;
  }
  popbm::BMatching m = popbm::parse_matching_text(g.instance, read_file(args.matching_path));
  popbm::VerifyResult res = popbm::verify(g.instance, m, popbm::VerifyMode::WEAK);
  if (!res.holds)
    popbm::fail(popbm::Errc::precondition, "matching is not weakly popular for the gadget");
  std::vector<bool> assignment = popbm::matching_to_assignment(g, m);
  std::ostringstream out;
  for (size_t v = 0; v < assignment.size(); ++v)
    out << (v + 1) << ' ' << (assignment[v] ? 1 : 0) << '\n';
  if (!args.out_path.empty()) write_file(args.out_path, out.str());
  std::cout << out.str();
  return kYes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"popular b-matching toolkit"};
  app.require_subcommand(1);

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "certify a matching popular / weakly popular");
  verify->add_option("--mode", verify_args.mode, "popular|weak")->required();
  verify->add_option("--instance", verify_args.instance_path)->required();
  verify->add_option("--matching", verify_args.matching_path)->required();

  BruteArgs bc_args;
  CLI::App* bc = app.add_subcommand("brute-check", "oracle check by exhaustive enumeration");
  bc->add_option("--mode", bc_args.mode, "popular|weak")->required();
  bc->add_option("--instance", bc_args.instance_path)->required();
  bc->add_option("--matching", bc_args.matching_path)->required();
  bc->add_option("--budget", bc_args.budget, "enumeration budget");

  BruteArgs bf_args;
  CLI::App* bf = app.add_subcommand("brute-find", "oracle search for a (weakly) popular matching");
  bf->add_option("--mode", bf_args.mode, "popular|weak")->required();
  bf->add_option("--instance", bf_args.instance_path)->required();
  bf->add_option("--budget", bf_args.budget, "enumeration budget");

  std::string solve_a_path;
  CLI::App* sa = app.add_subcommand("solve-a", "two-rank no-ties weakly popular solver");
  sa->add_option("--instance", solve_a_path)->required();

  std::string solve_ap_path;
  CLI::App* sap = app.add_subcommand("solve-aprime", "two-rank solver with rank-2 ties");
  sap->add_option("--instance", solve_ap_path)->required();

  std::string pm_instance, pm_partition;
  CLI::App* pm = app.add_subcommand("partition-match", "maximum matching meeting class quotas");
  pm->add_option("--instance", pm_instance)->required();
  pm->add_option("--partition", pm_partition)->required();

  std::string eou_instance, eou_matching;
  CLI::App* eou = app.add_subcommand("eou", "alternating-reachability labels");
  eou->add_option("--instance", eou_instance)->required();
  eou->add_option("--matching", eou_matching, "maximum matching; computed when omitted");

  CLI::App* reduce = app.add_subcommand("reduce", "compile a hardness gadget");
  reduce->require_subcommand(1);
  std::string rx_in, rx_out;
  CLI::App* rx = reduce->add_subcommand("x3c", "exact-3-cover to popularity gadget");
  rx->add_option("--in", rx_in)->required();
  rx->add_option("--out", rx_out)->required();
  std::string rs_in, rs_out;
  CLI::App* rs = reduce->add_subcommand("3sat", "3-SAT to weak-popularity gadget");
  rs->add_option("--in", rs_in)->required();
  rs->add_option("--out", rs_out)->required();

  CLI::App* translate = app.add_subcommand("translate", "move solutions across a reduction");
  translate->require_subcommand(1);
  TranslateArgs tc_args;
  CLI::App* tc = translate->add_subcommand("cover", "cover <-> gadget matching");
  tc->add_option("--x3c", tc_args.source_path)->required();
  tc->add_option("--cover", tc_args.cover_path, "forward: cover file (triple names)");
  tc->add_option("--matching", tc_args.matching_path, "reverse: gadget matching file");
  tc->add_option("--out", tc_args.out_path);
  TranslateArgs ta_args;
  CLI::App* ta = translate->add_subcommand("assignment", "assignment <-> gadget matching");
  ta->add_option("--cnf", ta_args.source_path)->required();
  ta->add_option("--assignment", ta_args.cover_path, "forward: '<var> <0|1>' lines");
  ta->add_option("--matching", ta_args.matching_path, "reverse: gadget matching file");
  ta->add_option("--out", ta_args.out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kYes : kInputError;
  }

  try {
    if (verify->parsed()) return run_verify(verify_args);
    if (bc->parsed()) return run_brute_check(bc_args);
    if (bf->parsed()) return run_brute_find(bf_args);
    if (sa->parsed()) return run_solver(solve_a_path, false);
    if (sap->parsed()) return run_solver(solve_ap_path, true);
    if (pm->parsed()) return run_partition_match(pm_instance, pm_partition);
    if (eou->parsed()) return run_eou(eou_instance, eou_matching);
    if (reduce->parsed()) {
      if (rx->parsed()) return run_reduce_x3c(rx_in, rx_out);
      if (rs->parsed()) return run_reduce_3sat(rs_in, rs_out);
    }
    if (translate->parsed()) {
      if (tc->parsed()) {
        if (tc_args.cover_path.empty() == tc_args.matching_path.empty())
          popbm::fail(popbm::Errc::bad_value, "give exactly one of --cover / --matching");
        return run_translate_cover(tc_args);
      }
      if (ta->parsed()) {
        if (ta_args.cover_path.empty() == ta_args.matching_path.empty())
          popbm::fail(popbm::Errc::bad_value, "give exactly one of --assignment / --matching");
        return run_translate_assignment(ta_args);
      }
    }
  } catch (const popbm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == popbm::Errc::discrepancy ? kDiscrepancy : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  std::cerr << "error: no subcommand\n";
  return kInputError;
}
