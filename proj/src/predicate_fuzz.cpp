#include "tqa/predicate_fuzz.hpp"

#include <array>
#include <charconv>

#include "tqa/table.hpp"

namespace tqa {
namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % bound);
}

bool chance(std::mt19937_64& rng, int percent) {
  return static_cast<int>(rng() % 100) < percent;
}

const std::array<const char*, 8> kNames = {
    "Year", "Winner", "School/Club Team", "a b", "it's", "x\\y", "", "Notes"};

std::string random_text(std::mt19937_64& rng) {
  static const std::string alphabet = "abcXYZ 019'\"\\_-/.\n";
  std::string out;
  std::size_t len = pick(rng, 9);
  for (std::size_t i = 0; i < len; ++i) {
    char c = alphabet[pick(rng, alphabet.size())];
    if (c == '\n' && !chance(rng, 10)) c = ' ';  // newlines are legal but rare
    out.push_back(c);
  }
  return out;
}

double random_number(std::mt19937_64& rng) {
  switch (pick(rng, 6)) {
    case 0: return static_cast<double>(pick(rng, 201)) - 100.0;
    case 1: return 0.0;
    case 2: return 0.5 + static_cast<double>(pick(rng, 10));
    case 3: return 3.14159;
    case 4: return 2.5e10;
    default: return static_cast<double>(pick(rng, 1000)) / 8.0;
  }
}

ExprPtr random_leaf(std::mt19937_64& rng) {
  switch (pick(rng, 5)) {
    case 0: return make_bool(chance(rng, 50));
    case 1: return make_num(random_number(rng));
    case 2: return make_str(random_text(rng));
    case 3: return make_col(kNames[pick(rng, kNames.size())]);
    default: return make_pos(pick(rng, 6));
  }
}

ExprPtr random_node(std::mt19937_64& rng, int depth) {
  if (depth <= 0 || chance(rng, 25)) return random_leaf(rng);
  switch (pick(rng, 4)) {
    case 0:
      return make_not(random_node(rng, depth - 1));
    case 1:
      return make_bool_op(chance(rng, 50) ? BoolKind::conjunction : BoolKind::disjunction,
                          random_node(rng, depth - 1), random_node(rng, depth - 1));
    case 2: {
      static const std::array<CmpKind, 7> ops = {CmpKind::eq, CmpKind::ne,  CmpKind::lt,
                                                 CmpKind::le, CmpKind::gt,  CmpKind::ge,
                                                 CmpKind::contains};
      return make_cmp(ops[pick(rng, ops.size())], random_node(rng, depth - 1),
                      random_node(rng, depth - 1));
    }
    default: {
      static const std::array<Builtin, 3> fns = {Builtin::lower, Builtin::cast_float,
                                                 Builtin::length};
      return make_call(fns[pick(rng, fns.size())], random_node(rng, depth - 1));
    }
  }
}

// ---------------------------------------------------------------------------
// Styled (dialect) rendering

struct Styler {
  std::mt19937_64& rng;
  int extra_wraps = 32;  // bounds the redundant-paren recursion

  std::string space() {
    switch (pick(rng, 10)) {
      case 0: return "  ";
      case 1: return " \t";
      default: return " ";
    }
  }

  std::string quote(const std::string& text) {
    char q = chance(rng, 50) ? '\'' : '"';
    std::string out(1, q);
    for (char c : text) {
      if (c == '\\' || c == q) out.push_back('\\');
      out.push_back(c);
    }
    out.push_back(q);
    return out;
  }

  std::string number(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
  }

  int level(const Expr& e) const {
    if (const auto* b = std::get_if<BoolExpr>(&e.node)) {
      return b->op == BoolKind::disjunction ? 0 : 1;
    }
    if (std::holds_alternative<NotExpr>(e.node)) return 2;
    if (std::holds_alternative<CmpExpr>(e.node)) return 3;
    return 4;
  }

  std::string render(const Expr& e, int required) {
    if (level(e) < required || (extra_wraps > 0 && chance(rng, 15))) {
      --extra_wraps;
      return "(" + render(e, 0) + ")";
    }
    struct Visitor {
      Styler& s;
      std::string operator()(const BoolLit& b) const {
        if (b.value) return chance(s.rng, 50) ? "true" : "True";
        return chance(s.rng, 50) ? "false" : "False";
      }
      std::string operator()(const NumLit& n) const { return s.number(n.value); }
      std::string operator()(const StrLit& str) const { return s.quote(str.value); }
      std::string operator()(const ColRef& c) const {
        std::string base = chance(s.rng, 50) ? "row" : "row_dict";
        return base + "[" + s.quote(c.name) + "]";
      }
      std::string operator()(const PosRef& p) const {
        std::string base = chance(s.rng, 50) ? "row" : "row_dict";
        return base + "[#" + std::to_string(p.index) + "]";
      }
      std::string operator()(const NotExpr& n) const {
        return "not" + s.space() + s.render(*n.operand, 2);
      }
      std::string operator()(const BoolExpr& b) const {
        const char* op = b.op == BoolKind::disjunction ? "or" : "and";
        int left = b.op == BoolKind::disjunction ? 0 : 1;
        return s.render(*b.lhs, left) + s.space() + op + s.space() +
               s.render(*b.rhs, left + 1);
      }
      std::string operator()(const CmpExpr& c) const {
        const char* op = "==";
        switch (c.op) {
          case CmpKind::eq: op = "=="; break;
          case CmpKind::ne: op = "!="; break;
          case CmpKind::lt: op = "<"; break;
          case CmpKind::le: op = "<="; break;
          case CmpKind::gt: op = ">"; break;
          case CmpKind::ge: op = ">="; break;
          case CmpKind::contains: op = "in"; break;
        }
        return s.render(*c.lhs, 4) + s.space() + op + s.space() + s.render(*c.rhs, 4);
      }
      std::string operator()(const CallExpr& c) const {
        const char* name = c.fn == Builtin::lower ? "lower"
                           : c.fn == Builtin::cast_float ? "float"
                                                         : "len";
        if (chance(s.rng, 40)) {  // method-call dialect: term.method()
          // a bare number before '.' would lex as "3." and break the chain
          bool dot_safe = std::holds_alternative<StrLit>(c.arg->node) ||
                          std::holds_alternative<ColRef>(c.arg->node) ||
                          std::holds_alternative<PosRef>(c.arg->node) ||
                          std::holds_alternative<CallExpr>(c.arg->node) ||
                          std::holds_alternative<BoolLit>(c.arg->node);
          std::string arg =
              dot_safe ? s.render(*c.arg, 4) : "(" + s.render(*c.arg, 0) + ")";
          return arg + "." + name + "()";
        }
        return std::string(name) + "(" + s.render(*c.arg, 0) + ")";
      }
    };
    return std::visit(Visitor{*this}, e.node);
  }
};

}  // namespace

ExprPtr random_predicate(std::mt19937_64& rng, int max_depth) {
  return random_node(rng, max_depth);
}

ExprPtr random_predicate_for_table(std::mt19937_64& rng, const Table& table, int max_depth) {
  auto leaf = [&]() -> ExprPtr {
    switch (pick(rng, 6)) {
      case 0: return make_bool(chance(rng, 50));
      case 1: return make_num(static_cast<double>(pick(rng, 120)));
      case 2: {
        // literals drawn from real cells sometimes match rows
        if (!table.rows.empty() && chance(rng, 70)) {
          const auto& row = table.rows[pick(rng, table.rows.size())];
          const auto& cell = row[pick(rng, row.size())];
          if (chance(rng, 50) && cell.size() > 1) {
            return make_str(cell.substr(0, 1 + pick(rng, cell.size())));
          }
          return make_str(cell);
        }
        return make_str(random_text(rng));
      }
      case 3:
      case 4: {
        if (!table.column_names.empty() && !chance(rng, 10)) {
          return make_col(table.column_names[pick(rng, table.column_names.size())]);
        }
        return make_col("missing_col");
      }
      default: return make_pos(pick(rng, table.column_names.size() + 2));
    }
  };
  auto node = [&](auto&& self, int depth) -> ExprPtr {
    if (depth <= 0 || chance(rng, 30)) return leaf();
    switch (pick(rng, 4)) {
      case 0: return make_not(self(self, depth - 1));
      case 1:
        return make_bool_op(chance(rng, 50) ? BoolKind::conjunction : BoolKind::disjunction,
                            self(self, depth - 1), self(self, depth - 1));
      case 2: {
        static const std::array<CmpKind, 7> ops = {CmpKind::eq, CmpKind::ne,  CmpKind::lt,
                                                   CmpKind::le, CmpKind::gt,  CmpKind::ge,
                                                   CmpKind::contains};
        return make_cmp(ops[pick(rng, ops.size())], self(self, depth - 1),
                        self(self, depth - 1));
      }
      default: {
        static const std::array<Builtin, 3> fns = {Builtin::lower, Builtin::cast_float,
                                                   Builtin::length};
        return make_call(fns[pick(rng, fns.size())], self(self, depth - 1));
      }
    }
  };
  return node(node, max_depth);
}

std::string styled_source(std::mt19937_64& rng, const ExprPtr& expr) {
  Styler styler{rng};
  return styler.render(*expr, 0);
}

FuzzReport run_predicate_fuzz(std::uint64_t seed, std::size_t iterations) {
  FuzzReport report;
  std::mt19937_64 rng(seed);
  auto note_failure = [&](const std::string& what) {
    if (report.failure_samples.size() < 5) report.failure_samples.push_back(what);
  };

  for (std::size_t i = 0; i < iterations; ++i) {
    ExprPtr ast = random_predicate(rng, 5);
    std::string canonical = render_predicate(ast);
    ++report.ast_cases;
    auto reparsed = parse_predicate(canonical);
    if (!reparsed.ok() || !expr_equal(ast, reparsed.value())) {
      ++report.ast_failures;
      note_failure("ast round-trip failed for: " + canonical);
      continue;
    }

    ++report.source_cases;
    std::string source = styled_source(rng, ast);
    auto first = parse_predicate(source);
    if (!first.ok() || !expr_equal(ast, first.value())) {
      ++report.source_failures;
      note_failure("styled source failed to parse back: " + source);
      continue;
    }
    std::string rendered = render_predicate(first.value());
    auto second = parse_predicate(rendered);
    if (!second.ok() || render_predicate(second.value()) != rendered) {
      ++report.source_failures;
      note_failure("render not stable for: " + rendered);
    }
  }
  return report;
}

}  // namespace tqa
