#include "bcn/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace bcn::dsl {

BoolExpr BoolExpr::variable(std::string name) {
  BoolExpr e;
  e.kind = Kind::variable;
  e.name = std::move(name);
  return e;
}

BoolExpr BoolExpr::constant(bool value) {
  BoolExpr e;
  e.kind = Kind::constant;
  e.value = value;
  return e;
}

BoolExpr BoolExpr::negation(BoolExpr operand) {
  BoolExpr e;
  e.kind = Kind::negation;
  e.operands.push_back(std::move(operand));
  return e;
}

BoolExpr BoolExpr::binary(Kind kind, BoolExpr lhs, BoolExpr rhs) {
  BoolExpr e;
  e.kind = kind;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

using Kind = BoolExpr::Kind;

enum class Tok { ident, number, op, end };

struct Token {
  Tok type = Tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  const auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.type = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      const auto digits = [&] {
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      };
      digits();
      if (j < src.size() && (src[j] == '.' || src[j] == '/')) {
        ++j;
        digits();
      }
      t.type = Tok::number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (src.substr(i, 3) == "<->") {
      t.type = Tok::op;
      t.text = "<->";
      advance(3);
    } else if (src.substr(i, 2) == "->") {
      t.type = Tok::op;
      t.text = "->";
      advance(2);
    } else if (std::string_view("!&|^()=,;").find(c) != std::string_view::npos) {
      t.type = Tok::op;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

int precedence(Kind k) {
  switch (k) {
    case Kind::equivalence: return 1;
    case Kind::implication: return 2;
    case Kind::exclusive_or: return 3;
    case Kind::disjunction: return 4;
    case Kind::conjunction: return 5;
    case Kind::negation: return 6;
    case Kind::variable:
    case Kind::constant: return 7;
  }
  return 7;
}

const char* symbol(Kind k) {
  switch (k) {
    case Kind::equivalence: return "<->";
    case Kind::implication: return "->";
    case Kind::exclusive_or: return "^";
    case Kind::disjunction: return "|";
    case Kind::conjunction: return "&";
    case Kind::negation: return "!";
    default: return "";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  NetworkSpec run() {
    NetworkSpec spec;
    bool saw_nodes = false, saw_inputs = false, saw_prob = false, saw_markov = false;
    bool explicit_modes = false;
    std::vector<std::vector<std::optional<BoolExpr>>> rules;
    std::vector<Token> mode_tokens;

    while (peek().type != Tok::end) {
      const Token kw = next();
      if (kw.type != Tok::ident) fail(kw, "expected a declaration keyword, found '" + kw.text + "'");

      if (kw.text == "nodes") {
        if (saw_nodes) fail(kw, "duplicate 'nodes' declaration");
        if (!rules.empty()) fail(kw, "'nodes' must precede modes and rules");
        saw_nodes = true;
        spec.nodes = identifier_list();
        if (spec.nodes.empty()) fail(kw, "'nodes' needs at least one name");
        expect(";");
      } else if (kw.text == "inputs") {
        if (saw_inputs) fail(kw, "duplicate 'inputs' declaration");
        if (!rules.empty()) fail(kw, "'inputs' must precede modes and rules");
        saw_inputs = true;
        spec.inputs = identifier_list();
        expect(";");
      } else if (kw.text == "mode") {
        require_nodes(kw, saw_nodes);
        if (!explicit_modes && !rules.empty()) fail(kw, "rules appear before the first 'mode'");
        explicit_modes = true;
        const Token name = next();
        if (name.type != Tok::ident) fail(name, "expected a mode name");
        for (const auto& m : spec.modes)
          if (m.name == name.text) fail(name, "duplicate mode '" + name.text + "'");
        spec.modes.push_back({name.text, {}});
        rules.emplace_back(spec.nodes.size());
        mode_tokens.push_back(name);
        expect(";");
      } else if (kw.text == "rule") {
        require_nodes(kw, saw_nodes);
        if (rules.empty()) {
          spec.modes.push_back({"main", {}});
          rules.emplace_back(spec.nodes.size());
          mode_tokens.push_back(kw);
        }
        const Token lhs = next();
        if (lhs.type != Tok::ident) fail(lhs, "expected a node name after 'rule'");
        const auto it = std::find(spec.nodes.begin(), spec.nodes.end(), lhs.text);
        if (it == spec.nodes.end()) fail(lhs, "undeclared node '" + lhs.text + "'");
        auto& slot = rules.back()[static_cast<std::size_t>(it - spec.nodes.begin())];
        if (slot) fail(lhs, "duplicate rule for node '" + lhs.text + "'");
        expect("=");
        slot = expression(spec);
        expect(";");
      } else if (kw.text == "prob") {
        if (saw_prob) fail(kw, "duplicate 'prob' declaration");
        saw_prob = true;
        spec.probs = rational_list();
        prob_token_ = kw;
        expect(";");
      } else if (kw.text == "markov") {
        if (saw_markov) fail(kw, "duplicate 'markov' declaration");
        saw_markov = true;
        spec.pi_rows.push_back(rational_list());
        while (peek_op("|")) {
          next();
          spec.pi_rows.push_back(rational_list());
        }
        markov_token_ = kw;
        expect(";");
      } else if (kw.text == "target") {
        require_nodes(kw, saw_nodes);
        if (spec.target) fail(kw, "duplicate 'target' declaration");
        BitVector bits;
        while (peek().type == Tok::number) {
          const Token b = next();
          if (b.text != "0" && b.text != "1") fail(b, "target bits must be 0 or 1");
          bits.bits.push_back(b.text == "1" ? 1 : 0);
        }
        if (bits.size() != spec.nodes.size()) {
          fail(kw, "target needs " + std::to_string(spec.nodes.size()) + " bits, found " +
                       std::to_string(bits.size()));
        }
        spec.target = bits;
        expect(";");
      } else {
        fail(kw, "unknown keyword '" + kw.text + "'");
      }
    }

    const Token& eof = peek();
    if (!saw_nodes) fail(eof, "missing 'nodes' declaration");
    if (spec.modes.empty()) fail(eof, "no rules given");
    for (std::size_t k = 0; k < rules.size(); ++k) {
      for (std::size_t j = 0; j < spec.nodes.size(); ++j) {
        if (!rules[k][j]) {
          fail(mode_tokens[k], "missing rule for node '" + spec.nodes[j] + "' in mode '" +
                                   spec.modes[k].name + "'");
        }
        spec.modes[k].rules.push_back(std::move(*rules[k][j]));
      }
    }

    if (saw_prob && saw_markov) fail(markov_token_, "'prob' and 'markov' are mutually exclusive");
    const std::size_t r = spec.modes.size();
    if (saw_prob) {
      spec.kind = NetworkClass::probabilistic;
      if (spec.probs.size() != r) {
        fail(prob_token_, "expected " + std::to_string(r) + " probabilities, found " +
                              std::to_string(spec.probs.size()));
      }
      Rational sum = 0;
      for (const auto& p : spec.probs) {
        if (sgn(p) <= 0) fail(prob_token_, "probabilities must be positive");
        sum += p;
      }
      if (sum != 1) fail(prob_token_, "probabilities do not sum to 1 (sum is " + to_string(sum) + ")");
    } else if (saw_markov) {
      spec.kind = NetworkClass::markovian;
      if (spec.pi_rows.size() != r) {
        fail(markov_token_, "expected " + std::to_string(r) + " transition rows, found " +
                                std::to_string(spec.pi_rows.size()));
      }
      RationalMatrix pi(r, r);
      for (std::size_t i = 0; i < r; ++i) {
        if (spec.pi_rows[i].size() != r) {
          fail(markov_token_, "transition row " + std::to_string(i + 1) + " needs " +
                                  std::to_string(r) + " entries");
        }
        Rational sum = 0;
        for (std::size_t j = 0; j < r; ++j) {
          pi.at(i, j) = spec.pi_rows[i][j];
          sum += spec.pi_rows[i][j];
        }
        if (sum != 1) {
          fail(markov_token_, "transition row " + std::to_string(i + 1) + " sums to " + to_string(sum));
        }
      }
      if (!is_irreducible(pi)) fail(markov_token_, "mode chain is not irreducible");
    } else {
      spec.kind = NetworkClass::deterministic;
      if (r != 1) fail(mode_tokens[1], "several modes need a 'prob' or 'markov' declaration");
    }
    return spec;
  }

 private:
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
  }

  static void require_nodes(const Token& t, bool saw_nodes) {
    if (!saw_nodes) fail(t, "'nodes' must be declared first");
  }

  const Token& peek() const { return toks_[pos_]; }
  Token next() {
    Token t = toks_[pos_];
    if (t.type != Tok::end) ++pos_;
    return t;
  }
  bool peek_op(std::string_view op) const { return peek().type == Tok::op && peek().text == op; }

  void expect(std::string_view op) {
    const Token t = next();
    if (t.type != Tok::op || t.text != op) {
      fail(t, "expected '" + std::string(op) + "', found " +
                  (t.type == Tok::end ? std::string("end of input") : "'" + t.text + "'"));
    }
  }

  std::vector<std::string> identifier_list() {
    std::vector<std::string> names;
    while (peek().type == Tok::ident) {
      const Token t = next();
      if (std::find(names.begin(), names.end(), t.text) != names.end() ||
          std::find(declared_.begin(), declared_.end(), t.text) != declared_.end()) {
        fail(t, "name '" + t.text + "' declared twice");
      }
      if (is_keyword(t.text)) fail(t, "'" + t.text + "' is a reserved word");
      names.push_back(t.text);
    }
    declared_.insert(declared_.end(), names.begin(), names.end());
    return names;
  }

  static bool is_keyword(std::string_view s) {
    return s == "nodes" || s == "inputs" || s == "mode" || s == "prob" || s == "markov" ||
           s == "target" || s == "rule";
  }

  RationalVector rational_list() {
    RationalVector out;
    for (;;) {
      const Token t = next();
      if (t.type != Tok::number) fail(t, "expected a probability literal");
      try {
        out.push_back(parse_rational(t.text));
      } catch (const std::invalid_argument& e) {
        fail(t, std::string("bad probability literal: ") + e.what());
      }
      if (!peek_op(",")) break;
      next();
    }
    return out;
  }

  // Precedence climbing over the binary levels, lowest first.
  BoolExpr expression(const NetworkSpec& spec) { return equivalence(spec); }

  BoolExpr equivalence(const NetworkSpec& spec) {
    BoolExpr lhs = implication(spec);
    while (peek_op("<->")) {
      next();
      lhs = BoolExpr::binary(Kind::equivalence, std::move(lhs), implication(spec));
    }
    return lhs;
  }

  BoolExpr implication(const NetworkSpec& spec) {
    BoolExpr lhs = exclusive_or(spec);
    if (peek_op("->")) {
      next();
      return BoolExpr::binary(Kind::implication, std::move(lhs), implication(spec));
    }
    return lhs;
  }

  BoolExpr exclusive_or(const NetworkSpec& spec) {
    BoolExpr lhs = disjunction(spec);
    while (peek_op("^")) {
      next();
      lhs = BoolExpr::binary(Kind::exclusive_or, std::move(lhs), disjunction(spec));
    }
    return lhs;
  }

  BoolExpr disjunction(const NetworkSpec& spec) {
    BoolExpr lhs = conjunction(spec);
    while (peek_op("|")) {
      next();
      lhs = BoolExpr::binary(Kind::disjunction, std::move(lhs), conjunction(spec));
    }
    return lhs;
  }

  BoolExpr conjunction(const NetworkSpec& spec) {
    BoolExpr lhs = unary(spec);
    while (peek_op("&")) {
      next();
      lhs = BoolExpr::binary(Kind::conjunction, std::move(lhs), unary(spec));
    }
    return lhs;
  }

  BoolExpr unary(const NetworkSpec& spec) {
    if (peek_op("!")) {
      next();
      return BoolExpr::negation(unary(spec));
    }
    if (peek_op("(")) {
      next();
      BoolExpr inner = expression(spec);
      expect(")");
      return inner;
    }
    const Token t = next();
    if (t.type == Tok::number) {
      if (t.text == "0" || t.text == "1") return BoolExpr::constant(t.text == "1");
      fail(t, "Boolean constants are 0 and 1");
    }
    if (t.type != Tok::ident) {
      fail(t, "expected an operand, found " +
                  (t.type == Tok::end ? std::string("end of input") : "'" + t.text + "'"));
    }
    const bool known =
        std::find(spec.nodes.begin(), spec.nodes.end(), t.text) != spec.nodes.end() ||
        std::find(spec.inputs.begin(), spec.inputs.end(), t.text) != spec.inputs.end();
    if (!known) fail(t, "undeclared identifier '" + t.text + "'");
    return BoolExpr::variable(t.text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> declared_;
  Token prob_token_;
  Token markov_token_;
};

// Expression with variables resolved to positions, for fast evaluation.
struct Resolved {
  Kind kind;
  std::size_t var = 0;
  bool value = false;
  std::vector<Resolved> operands;
};

Resolved resolve(const BoolExpr& e, const std::vector<std::string>& names) {
  Resolved r{e.kind, 0, e.value, {}};
  if (e.kind == Kind::variable) {
    const auto it = std::find(names.begin(), names.end(), e.name);
    if (it == names.end()) throw std::invalid_argument("unbound variable '" + e.name + "'");
    r.var = static_cast<std::size_t>(it - names.begin());
  }
  for (const auto& op : e.operands) r.operands.push_back(resolve(op, names));
  return r;
}

bool eval(const Resolved& e, const std::vector<std::uint8_t>& v) {
  switch (e.kind) {
    case Kind::variable: return v[e.var] != 0;
    case Kind::constant: return e.value;
    case Kind::negation: return !eval(e.operands[0], v);
    case Kind::conjunction: return eval(e.operands[0], v) && eval(e.operands[1], v);
    case Kind::disjunction: return eval(e.operands[0], v) || eval(e.operands[1], v);
    case Kind::exclusive_or: return eval(e.operands[0], v) != eval(e.operands[1], v);
    case Kind::implication: return !eval(e.operands[0], v) || eval(e.operands[1], v);
    case Kind::equivalence: return eval(e.operands[0], v) == eval(e.operands[1], v);
  }
  return false;
}

void print_expr(std::ostream& os, const BoolExpr& e) {
  switch (e.kind) {
    case Kind::variable: os << e.name; return;
    case Kind::constant: os << (e.value ? "1" : "0"); return;
    case Kind::negation: {
      os << "!";
      const bool paren = precedence(e.operands[0].kind) < precedence(Kind::negation);
      if (paren) os << "(";
      print_expr(os, e.operands[0]);
      if (paren) os << ")";
      return;
    }
    default: break;
  }
  const int p = precedence(e.kind);
  const bool right_assoc = e.kind == Kind::implication;
  const int pl = precedence(e.operands[0].kind);
  const int pr = precedence(e.operands[1].kind);
  const bool paren_l = pl < p || (pl == p && right_assoc);
  const bool paren_r = pr < p || (pr == p && !right_assoc);
  if (paren_l) os << "(";
  print_expr(os, e.operands[0]);
  if (paren_l) os << ")";
  os << " " << symbol(e.kind) << " ";
  if (paren_r) os << "(";
  print_expr(os, e.operands[1]);
  if (paren_r) os << ")";
}

void check_bits(const NetworkSpec& spec, const CompileOptions& options) {
  const std::size_t bits = spec.nodes.size() + spec.inputs.size();
  if (bits > options.max_bits) {
    throw CapacityError("network has " + std::to_string(bits) + " encoded bits (n+m), cap is " +
                        std::to_string(options.max_bits));
  }
  if (spec.nodes.empty()) throw std::invalid_argument("network has no nodes");
}

CompiledNetwork shell(const NetworkSpec& spec) {
  CompiledNetwork net;
  net.kind = spec.kind;
  net.n = spec.nodes.size();
  net.m = spec.inputs.size();
  net.probs = spec.probs;
  if (spec.kind == NetworkClass::markovian) {
    const std::size_t r = spec.pi_rows.size();
    net.pi = RationalMatrix(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) net.pi.at(i, j) = spec.pi_rows[i][j];
  }
  net.permutation = LogicalMatrix::identity(net.state_count());
  net.node_names = spec.nodes;
  net.input_names = spec.inputs;
  for (const auto& mode : spec.modes) net.mode_names.push_back(mode.name);
  return net;
}

CompiledNetwork finish(CompiledNetwork net, const NetworkSpec& spec) {
  net.validate();
  if (spec.target) return relabel_equilibrium(net, *spec.target);
  return net;
}

// Unpacks the (1-based) canonical index of `bits` encoded bits into out[offset..).
void unpack(std::size_t index, std::size_t bits, std::vector<std::uint8_t>& out, std::size_t offset) {
  const std::size_t z = index - 1;
  for (std::size_t i = 0; i < bits; ++i) out[offset + i] = ((z >> (bits - 1 - i)) & 1U) ? 0 : 1;
}

}  // namespace

NetworkSpec parse(std::string_view text) { return Parser(text).run(); }

std::string print(const BoolExpr& expr) {
  std::ostringstream os;
  print_expr(os, expr);
  return os.str();
}

std::string print(const NetworkSpec& spec) {
  std::ostringstream os;
  os << "nodes";
  for (const auto& n : spec.nodes) os << " " << n;
  os << ";\n";
  if (!spec.inputs.empty()) {
    os << "inputs";
    for (const auto& u : spec.inputs) os << " " << u;
    os << ";\n";
  }
  for (const auto& mode : spec.modes) {
    if (spec.kind != NetworkClass::deterministic || mode.name != "main") os << "mode " << mode.name << ";\n";
    for (std::size_t j = 0; j < spec.nodes.size(); ++j) {
      os << "rule " << spec.nodes[j] << " = " << print(mode.rules[j]) << ";\n";
    }
  }
  const auto list = [&](const RationalVector& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << to_string(v[i]);
  };
  if (spec.kind == NetworkClass::probabilistic) {
    os << "prob ";
    list(spec.probs);
    os << ";\n";
  } else if (spec.kind == NetworkClass::markovian) {
    os << "markov ";
    for (std::size_t i = 0; i < spec.pi_rows.size(); ++i) {
      if (i) os << " | ";
      list(spec.pi_rows[i]);
    }
    os << ";\n";
  }
  if (spec.target) {
    os << "target";
    for (auto b : spec.target->bits) os << " " << int(b);
    os << ";\n";
  }
  return os.str();
}

bool evaluate(const BoolExpr& expr, const std::vector<std::string>& names,
              const std::vector<std::uint8_t>& values) {
  return eval(resolve(expr, names), values);
}

CompiledNetwork compile(const NetworkSpec& spec, const CompileOptions& options) {
  check_bits(spec, options);
  CompiledNetwork net = shell(spec);
  const std::size_t n = net.n, m = net.m;
  const std::size_t states = net.state_count(), controls = net.control_count();

  std::vector<std::string> names = spec.nodes;
  names.insert(names.end(), spec.inputs.begin(), spec.inputs.end());

  std::vector<std::uint8_t> env(n + m), next(n);
  for (const auto& mode : spec.modes) {
    std::vector<Resolved> rules;
    for (const auto& r : mode.rules) rules.push_back(resolve(r, names));
    std::vector<std::size_t> cols(states * controls);
    for (std::size_t u = 1; u <= controls; ++u) {
      if (m > 0) unpack(u, m, env, n);
      for (std::size_t x = 1; x <= states; ++x) {
        unpack(x, n, env, 0);
        std::size_t index = 1;
        for (std::size_t j = 0; j < n; ++j) {
          if (!eval(rules[j], env)) index += std::size_t{1} << (n - 1 - j);
        }
        cols[(u - 1) * states + x - 1] = index;
      }
    }
    net.modes.emplace_back(states, std::move(cols));
  }
  return finish(std::move(net), spec);
}

CompiledNetwork compile_via_stp(const NetworkSpec& spec, const CompileOptions& options) {
  check_bits(spec, options);
  CompiledNetwork net = shell(spec);
  const std::size_t n = net.n, m = net.m;
  const std::size_t states = net.state_count(), controls = net.control_count();
  const std::size_t d = states * controls;

  std::vector<std::string> names = spec.nodes;
  names.insert(names.end(), spec.inputs.begin(), spec.inputs.end());

  // Structure matrices are built over the natural variable order x kron u;
  // the swap matrix W_[2^m, 2^n] turns them into functions of u kron x.
  const LogicalMatrix swap = swap_matrix(controls, states);
  const LogicalMatrix phi = power_reducing_matrix(d);
  const LogicalMatrix eye = LogicalMatrix::identity(d);

  std::vector<std::uint8_t> env(n + m);
  for (const auto& mode : spec.modes) {
    LogicalMatrix transition;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::uint8_t> table(d);
      for (std::size_t w = 1; w <= d; ++w) {
        unpack(w, n + m, env, 0);
        table[w - 1] = evaluate(mode.rules[j], names, env) ? 1 : 0;
      }
      const LogicalMatrix node = stp(structure_matrix(table), swap);
      // (T w)(M w) = T (I_d kron M) Phi_d w.
      transition = j == 0 ? node : stp(stp(transition, kron(eye, node)), phi);
    }
    net.modes.push_back(std::move(transition));
  }
  return finish(std::move(net), spec);
}

CompiledNetwork unrelabel(const CompiledNetwork& net) {
  const LogicalMatrix& p = net.permutation;
  const std::size_t states = net.state_count();
  if (p == LogicalMatrix::identity(states)) return net;
  CompiledNetwork out = net;
  for (auto& mode : out.modes) {
    std::vector<std::size_t> cols(mode.cols());
    for (std::size_t u = 1; u <= net.control_count(); ++u)
      for (std::size_t x = 1; x <= states; ++x)
        cols[(u - 1) * states + x - 1] = p.column(mode.column((u - 1) * states + p.column(x)));
    mode = LogicalMatrix(states, std::move(cols));
  }
  out.permutation = LogicalMatrix::identity(states);
  return out;
}

CompiledNetwork relabel_equilibrium(const CompiledNetwork& net, const BitVector& target) {
  if (target.size() != net.n) {
    throw DimensionError("target has " + std::to_string(target.size()) + " bits, network has " +
                         std::to_string(net.n) + " nodes");
  }
  CompiledNetwork base = unrelabel(net);
  const std::size_t states = base.state_count();
  const std::size_t k = encode_state(target).index();
  if (k == states) return base;
  base.permutation = equilibrium_permutation(k, states);
  // unrelabel conjugates by the stored permutation, which is what we want here.
  CompiledNetwork out = unrelabel(base);
  out.permutation = base.permutation;
  return out;
}

}  // namespace bcn::dsl
