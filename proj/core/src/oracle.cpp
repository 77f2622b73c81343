#include "popbm/oracle.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace popbm {

long long enumeration_bound(const Instance& inst) {
  constexpr long long kCap = 1LL << 62;
  long long prod = 1;
  for (int h = 0; h < inst.house_count(); ++h) {
    long long f = static_cast<long long>(inst.house_edges(h).size()) + 1;
    if (prod > kCap / f) return kCap;
    prod *= f;
  }
  return prod;
}

namespace {

struct Enumerator {
  const Instance& inst;
  const std::function<bool(std::span<const int>)>& visit;
  std::vector<int> chosen;      // current edge subset, ids ascending per house
  std::vector<int> agent_deg;
  std::vector<int> house_deg;
  bool stopped = false;

  bool run_house(int h) {
    if (h == inst.house_count()) {
      if (!visit(chosen)) stopped = true;
      return !stopped;
    }
    return run_edges(h, 0);
  }

  // Exclusion branch first so subsets appear in a stable order with the
  // empty choice leading.
  bool run_edges(int h, size_t i) {
    std::span<const int> edges = inst.house_edges(h);
    if (i == edges.size()) return run_house(h + 1);
    if (!run_edges(h, i + 1)) return false;
    int e = edges[i];
    int a = inst.edge(e).agent;
    if (house_deg[h] < inst.house_capacity(h) && agent_deg[a] < inst.agent_capacity(a)) {
      ++house_deg[h];
      ++agent_deg[a];
      chosen.push_back(e);
      bool cont = run_edges(h, i + 1);
      chosen.pop_back();
      --house_deg[h];
      --agent_deg[a];
      if (!cont) return false;
    }
    return true;
  }
};

}  // namespace

void enumerate_b_matchings(const Instance& inst,
                           const std::function<bool(std::span<const int>)>& visit,
                           const EnumOptions& opts) {
  long long bound = enumeration_bound(inst);
  if (bound > opts.budget)
    fail(Errc::budget_exceeded, "enumeration bound " + std::to_string(bound) +
                                    " exceeds budget " + std::to_string(opts.budget));
  Enumerator en{inst, visit, {}, std::vector<int>(inst.agent_count(), 0),
                std::vector<int>(inst.house_count(), 0)};
  en.chosen.reserve(inst.edge_count());
  en.run_house(0);
}

namespace {

// The enumerator yields edges grouped by house; comparisons need sorted ids.
std::vector<int> sorted_ids(std::span<const int> ids) {
  std::vector<int> v(ids.begin(), ids.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

OracleVerdict brute_check(const Instance& inst, const BMatching& m, OracleMode mode,
                          const EnumOptions& opts) {
  OracleVerdict verdict;
  verdict.holds = true;
  std::span<const int> query(m.edge_ids());
  enumerate_b_matchings(
      inst,
      [&](std::span<const int> cand) {
        std::vector<int> ids = sorted_ids(cand);
        Verdict v = mode == OracleMode::POPULAR ? more_popular_span(inst, ids, query)
                                                : more_weakly_popular_span(inst, ids, query);
        if (v == Verdict::FIRST_MORE_POPULAR) {
          verdict.holds = false;
          verdict.counterexample = BMatching::unchecked(inst, ids);
          return false;
        }
        return true;
      },
      opts);
  return verdict;
}

std::optional<BMatching> brute_find(const Instance& inst, OracleMode mode,
                                    const EnumOptions& opts) {
  // Materialise the stream once, then test candidates in enumeration order.
  std::vector<std::vector<int>> all;
  enumerate_b_matchings(
      inst,
      [&](std::span<const int> cand) {
        all.push_back(sorted_ids(cand));
        return true;
      },
      opts);
  for (const auto& cand : all) {
    bool beaten = false;
    for (const auto& other : all) {
      Verdict v = mode == OracleMode::POPULAR ? more_popular_span(inst, other, cand)
                                              : more_weakly_popular_span(inst, other, cand);
      if (v == Verdict::FIRST_MORE_POPULAR) {
        beaten = true;
        break;
      }
    }
    if (!beaten) return BMatching::unchecked(inst, cand);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// X3C

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

X3CInstance parse_x3c(std::istream& in) {
  X3CInstance x;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "element" && tok.size() == 2) {
      if (std::find(x.ground_set.begin(), x.ground_set.end(), tok[1]) != x.ground_set.end())
        fail(Errc::duplicate_vertex, "line " + std::to_string(line_no) + ": duplicate element");
      x.ground_set.push_back(tok[1]);
    } else if (tok[0] == "set" && tok.size() == 5) {
      X3CTriple t{tok[1], {tok[2], tok[3], tok[4]}};
      for (const auto& e : t.elems)
        if (std::find(x.ground_set.begin(), x.ground_set.end(), e) == x.ground_set.end())
          fail(Errc::unknown_vertex,
               "line " + std::to_string(line_no) + ": unknown element '" + e + "'");
      if (t.elems[0] == t.elems[1] || t.elems[0] == t.elems[2] || t.elems[1] == t.elems[2])
        fail(Errc::bad_value, "line " + std::to_string(line_no) + ": triple elements must differ");
      for (const auto& other : x.triples)
        if (other.name == t.name)
          fail(Errc::duplicate_vertex, "line " + std::to_string(line_no) + ": duplicate set name");
      x.triples.push_back(std::move(t));
    } else {
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": expected 'element' or 'set'");
    }
  }
  if (x.ground_set.size() % 3 != 0)
    fail(Errc::bad_value, "ground set size must be divisible by 3");
  return x;
}

X3CInstance parse_x3c_text(const std::string& text) {
  std::istringstream in(text);
  return parse_x3c(in);
}

void serialize_x3c(const X3CInstance& x, std::ostream& out) {
  for (const auto& e : x.ground_set) out << "element " << e << '\n';
  for (const auto& t : x.triples)
    out << "set " << t.name << ' ' << t.elems[0] << ' ' << t.elems[1] << ' ' << t.elems[2] << '\n';
}

std::optional<std::vector<std::string>> solve_x3c(const X3CInstance& x) {
  if (x.ground_set.size() > 12)
    fail(Errc::size_limit, "solve_x3c handles at most 12 elements");
  const int n = static_cast<int>(x.ground_set.size());
  const int m = static_cast<int>(x.triples.size());
  auto elem_index = [&](const std::string& e) {
    return static_cast<int>(std::find(x.ground_set.begin(), x.ground_set.end(), e) -
                            x.ground_set.begin());
  };
  std::vector<unsigned> masks(m, 0);
  for (int i = 0; i < m; ++i)
    for (const auto& e : x.triples[i].elems) masks[i] |= 1u << elem_index(e);
  const unsigned full = n == 0 ? 0u : (1u << n) - 1;
  // try subsets of triples in increasing size for a smallest certificate
  std::vector<int> pick;
  std::function<bool(int, unsigned)> go = [&](int from, unsigned covered) {
    if (covered == full) return true;
    for (int i = from; i < m; ++i) {
      if (masks[i] & covered) continue;
      pick.push_back(i);
      if (go(i + 1, covered | masks[i])) return true;
      pick.pop_back();
    }
    return false;
  };
  if (!go(0, 0u)) return std::nullopt;
  std::vector<std::string> names;
  names.reserve(pick.size());
  for (int i : pick) names.push_back(x.triples[i].name);
  return names;
}

// ---------------------------------------------------------------------------
// 3-SAT

CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula f;
  bool header = false;
  int expected_clauses = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      if (header || tok.size() != 4 || tok[1] != "cnf")
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad DIMACS header");
      header = true;
      f.variable_count = std::stoi(tok[2]);
      expected_clauses = std::stoi(tok[3]);
      if (f.variable_count < 1) fail(Errc::bad_value, "variable count must be >= 1");
      continue;
    }
    if (!header) fail(Errc::parse_error, "line " + std::to_string(line_no) + ": clause before header");
    std::vector<int> lits;
    for (const auto& t : tok) {
      int v = 0;
      try {
        v = std::stoi(t);
      } catch (const std::exception&) {
        fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad literal '" + t + "'");
      }
      if (v == 0) break;
      lits.push_back(v);
    }
    if (lits.size() != 3)
      fail(Errc::bad_value,
           "line " + std::to_string(line_no) + ": clauses must have exactly 3 literals");
    for (int l : lits)
      if (std::abs(l) > f.variable_count)
        fail(Errc::bad_value, "line " + std::to_string(line_no) + ": literal out of range");
    f.clauses.push_back({lits[0], lits[1], lits[2]});
  }
  if (!header) fail(Errc::parse_error, "missing DIMACS header");
  if (expected_clauses >= 0 && expected_clauses != static_cast<int>(f.clauses.size()))
    fail(Errc::parse_error, "clause count does not match header");
  return f;
}

CnfFormula parse_dimacs_text(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

void serialize_dimacs(const CnfFormula& f, std::ostream& out) {
  out << "p cnf " << f.variable_count << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) out << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
}

bool clause_satisfied(const std::array<int, 3>& clause, const std::vector<bool>& assignment) {
  for (int lit : clause) {
    bool v = assignment[std::abs(lit) - 1];
    if (lit > 0 ? v : !v) return true;
  }
  return false;
}

bool formula_satisfied(const CnfFormula& f, const std::vector<bool>& assignment) {
  for (const auto& c : f.clauses)
    if (!clause_satisfied(c, assignment)) return false;
  return true;
}

std::optional<std::vector<bool>> solve_3sat(const CnfFormula& f) {
  if (f.variable_count > 20)
    fail(Errc::size_limit, "solve_3sat handles at most 20 variables");
  const unsigned total = 1u << f.variable_count;
  for (unsigned bits = 0; bits < total; ++bits) {
    std::vector<bool> a(f.variable_count);
    for (int i = 0; i < f.variable_count; ++i) a[i] = (bits >> i) & 1u;
    if (formula_satisfied(f, a)) return a;
  }
  return std::nullopt;
}

}  // namespace popbm
