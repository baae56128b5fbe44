#include "spde/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace spde {

namespace {

std::string join_violations(const std::vector<Violation>& vs) {
  std::ostringstream os;
  os << "scenario: " << vs.size() << " violation(s)";
  for (const Violation& v : vs) os << "\n  line " << v.line << ":" << v.col << ": " << v.message;
  return os.str();
}

// ---------------------------------------------------------------------------
// Value grammar: number | "string" | true/false | [v, ...] | {k = v, ...}
// ---------------------------------------------------------------------------

struct Value {
  enum class Kind { Number, String, Bool, Array, Table } kind = Kind::Number;
  double num = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<Value> array;
  std::vector<std::pair<std::string, Value>> table;
  int line = 0, col = 0;
};

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Violation>& out;

  Parser(const std::string& t, std::vector<Violation>& o) : text(t), out(o) {}

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
  char get() {
    const char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  bool eof() const { return pos >= text.size(); }

  void fail(const std::string& msg) { out.push_back({line, col, msg}); }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }
  void skip_ws_and_comments() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        get();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else {
        break;
      }
    }
  }

  std::string parse_key() {
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) k += get();
    return k;
  }

  std::optional<Value> parse_value() {
    skip_inline_ws();
    Value v;
    v.line = line;
    v.col = col;
    const char c = peek();
    if (c == '"') {
      get();
      v.kind = Value::Kind::String;
      while (!eof() && peek() != '"' && peek() != '\n') v.str += get();
      if (peek() != '"') {
        fail("unterminated string");
        return std::nullopt;
      }
      get();
      return v;
    }
    if (c == '[') {
      get();
      v.kind = Value::Kind::Array;
      skip_ws_and_comments();
      if (peek() == ']') {
        get();
        return v;
      }
      while (true) {
        auto item = parse_value();
        if (!item) return std::nullopt;
        v.array.push_back(std::move(*item));
        skip_ws_and_comments();
        if (peek() == ',') {
          get();
          skip_ws_and_comments();
          continue;
        }
        if (peek() == ']') {
          get();
          return v;
        }
        fail("expected ',' or ']' in array");
        return std::nullopt;
      }
    }
    if (c == '{') {
      get();
      v.kind = Value::Kind::Table;
      skip_ws_and_comments();
      if (peek() == '}') {
        get();
        return v;
      }
      while (true) {
        skip_ws_and_comments();
        const std::string k = parse_key();
        if (k.empty()) {
          fail("expected key in inline table");
          return std::nullopt;
        }
        skip_inline_ws();
        if (peek() != '=') {
          fail("expected '=' in inline table");
          return std::nullopt;
        }
        get();
        auto item = parse_value();
        if (!item) return std::nullopt;
        v.table.emplace_back(k, std::move(*item));
        skip_ws_and_comments();
        if (peek() == ',') {
          get();
          continue;
        }
        if (peek() == '}') {
          get();
          return v;
        }
        fail("expected ',' or '}' in inline table");
        return std::nullopt;
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string word = parse_key();
      if (word == "true" || word == "false") {
        v.kind = Value::Kind::Bool;
        v.boolean = (word == "true");
        return v;
      }
      fail("unknown literal '" + word + "'");
      return std::nullopt;
    }
    // number
    std::string num;
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '+' ||
                      peek() == '-' || peek() == '.' || peek() == 'e' || peek() == 'E'))
      num += get();
    if (num.empty()) {
      fail("expected a value");
      return std::nullopt;
    }
    char* end = nullptr;
    v.num = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0') {
      fail("malformed number '" + num + "'");
      return std::nullopt;
    }
    v.kind = Value::Kind::Number;
    return v;
  }
};

struct Entry {
  Value value;
  bool used = false;
};
using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

Document parse_document(const std::string& text, std::vector<Violation>& out) {
  Parser p(text, out);
  Document doc;
  std::string current;
  while (true) {
    p.skip_ws_and_comments();
    if (p.eof()) break;
    const int line = p.line, col = p.col;
    if (p.peek() == '[') {
      p.get();
      const std::string name = p.parse_key();
      if (p.peek() != ']') {
        out.push_back({line, col, "unterminated section header"});
        while (!p.eof() && p.peek() != '\n') p.get();
        continue;
      }
      p.get();
      static const char* known[] = {"noise", "grid", "equation", "time", "solver", "run"};
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* k) { return name == k; }) == std::end(known))
        out.push_back({line, col, "unknown section [" + name + "]"});
      current = name;
      continue;
    }
    const std::string key = p.parse_key();
    if (key.empty()) {
      out.push_back({line, col, "expected key or section header"});
      while (!p.eof() && p.peek() != '\n') p.get();
      continue;
    }
    p.skip_inline_ws();
    if (p.peek() != '=') {
      out.push_back({p.line, p.col, "expected '=' after key '" + key + "'"});
      while (!p.eof() && p.peek() != '\n') p.get();
      continue;
    }
    p.get();
    auto value = p.parse_value();
    if (!value) {
      while (!p.eof() && p.peek() != '\n') p.get();
      continue;
    }
    if (current.empty()) {
      out.push_back({line, col, "key '" + key + "' outside any section"});
      continue;
    }
    if (doc[current].count(key))
      out.push_back({line, col, "duplicate key '" + key + "' in [" + current + "]"});
    doc[current][key] = Entry{std::move(*value), false};
  }
  return doc;
}

// Typed accessors collecting violations instead of throwing.
struct Reader {
  Document& doc;
  std::vector<Violation>& out;

  Entry* find(const std::string& sec, const std::string& key) {
    auto s = doc.find(sec);
    if (s == doc.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }
  template <class F>
  void number(const std::string& sec, const std::string& key, F&& assign) {
    if (Entry* e = find(sec, key)) {
      if (e->value.kind != Value::Kind::Number)
        out.push_back({e->value.line, e->value.col, "[" + sec + "] " + key + " must be a number"});
      else
        assign(e->value.num);
    }
  }
  template <class F>
  void string(const std::string& sec, const std::string& key, F&& assign) {
    if (Entry* e = find(sec, key)) {
      if (e->value.kind != Value::Kind::String)
        out.push_back({e->value.line, e->value.col, "[" + sec + "] " + key + " must be a string"});
      else
        assign(e->value.str, e->value.line, e->value.col);
    }
  }
  template <class F>
  void boolean(const std::string& sec, const std::string& key, F&& assign) {
    if (Entry* e = find(sec, key)) {
      if (e->value.kind != Value::Kind::Bool)
        out.push_back({e->value.line, e->value.col, "[" + sec + "] " + key + " must be true/false"});
      else
        assign(e->value.boolean);
    }
  }
  template <class F>
  void number_array(const std::string& sec, const std::string& key, F&& assign) {
    if (Entry* e = find(sec, key)) {
      if (e->value.kind != Value::Kind::Array) {
        out.push_back({e->value.line, e->value.col, "[" + sec + "] " + key + " must be an array"});
        return;
      }
      std::vector<double> xs;
      for (const Value& item : e->value.array) {
        if (item.kind != Value::Kind::Number) {
          out.push_back({item.line, item.col, "[" + sec + "] " + key + " must hold numbers"});
          return;
        }
        xs.push_back(item.num);
      }
      assign(std::move(xs));
    }
  }

  void report_unknown_keys() {
    for (auto& [sec, entries] : doc)
      for (auto& [key, entry] : entries)
        if (!entry.used)
          out.push_back({entry.value.line, entry.value.col,
                         "unknown key '" + key + "' in [" + sec + "]"});
  }
};

std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<Violation> v)
    : std::runtime_error(join_violations(v)), violations(std::move(v)) {}

Scenario parse_scenario(const std::string& text) {
  std::vector<Violation> out;
  Document doc = parse_document(text, out);
  Reader rd{doc, out};
  Scenario s;

  // [noise]
  std::vector<NoiseMode> modes;
  bool have_modes = false;
  if (Entry* e = rd.find("noise", "modes")) {
    have_modes = true;
    if (e->value.kind != Value::Kind::Array) {
      out.push_back({e->value.line, e->value.col, "[noise] modes must be an array of tables"});
    } else {
      for (const Value& item : e->value.array) {
        if (item.kind != Value::Kind::Table) {
          out.push_back({item.line, item.col, "[noise] modes entries must be inline tables"});
          continue;
        }
        NoiseMode m;
        bool saw_mu = false, saw_basis = false;
        for (const auto& [k, v] : item.table) {
          if (k == "mu" && v.kind == Value::Kind::Number) {
            m.mu = v.num;
            saw_mu = true;
          } else if (k == "basis" && v.kind == Value::Kind::String) {
            saw_basis = true;
            if (v.str == "const")
              m.basis = BasisKind::Const;
            else if (v.str == "sin")
              m.basis = BasisKind::Sin;
            else if (v.str == "cos")
              m.basis = BasisKind::Cos;
            else
              out.push_back({v.line, v.col, "[noise] basis must be const|sin|cos"});
          } else if (k == "k" && v.kind == Value::Kind::Number) {
            m.k = static_cast<int>(std::llround(v.num));
          } else {
            out.push_back({v.line, v.col, "[noise] unknown or mistyped mode key '" + k + "'"});
          }
        }
        if (!saw_mu) out.push_back({item.line, item.col, "[noise] mode needs mu"});
        if (!saw_basis) out.push_back({item.line, item.col, "[noise] mode needs basis"});
        modes.push_back(m);
      }
    }
  }
  int truncation = -1;
  rd.number("noise", "truncation", [&](double x) { truncation = static_cast<int>(std::llround(x)); });
  rd.number("noise", "seed", [&](double x) { s.seed = static_cast<std::uint64_t>(std::llround(x)); });

  // [grid]
  rd.number("grid", "length", [&](double x) { s.grid_length = x; });
  rd.number("grid", "nodes", [&](double x) { s.grid_nodes = static_cast<int>(std::llround(x)); });
  rd.string("grid", "bc", [&](const std::string& v, int line, int col) {
    if (v == "dirichlet")
      s.grid_bc = Bc::Dirichlet;
    else if (v == "inflow")
      s.grid_bc = Bc::Inflow;
    else
      out.push_back({line, col, "[grid] bc must be dirichlet|inflow"});
  });

  // [equation]
  EquationDef& eq = s.equation;
  bool have_kind = false;
  rd.string("equation", "kind", [&](const std::string& v, int line, int col) {
    have_kind = true;
    if (v == "PLaplacianReaction") {
      eq.kind = EqKind::PLaplacianReaction;
      eq.pivot = SpaceTag::L2;
    } else if (v == "PorousMedium") {
      eq.kind = EqKind::PorousMedium;
      eq.pivot = SpaceTag::Hminus1;
      eq.reaction = ReactionKind::Power;
    } else if (v == "Transport") {
      eq.kind = EqKind::Transport;
      eq.pivot = SpaceTag::L2;
    } else if (v == "FiniteDimGraph") {
      eq.kind = EqKind::FiniteDimGraph;
      eq.pivot = SpaceTag::Rd;
      eq.reaction = ReactionKind::None;
    } else {
      out.push_back({line, col, "[equation] unknown kind '" + v + "'"});
      have_kind = false;
    }
  });
  rd.number("equation", "p", [&](double x) { eq.p = x; });
  rd.number("equation", "q", [&](double x) { eq.q = x; });
  rd.number("equation", "lambda", [&](double x) { eq.lambda = x; });
  rd.number("equation", "delta", [&](double x) { eq.delta = x; });
  rd.number("equation", "velocity", [&](double x) { eq.velocity_const = x; });
  rd.number("equation", "b", [&](double x) { eq.b_const = x; });
  rd.string("equation", "flux", [&](const std::string& v, int line, int col) {
    if (v == "plaplace")
      eq.flux = FluxKind::PLaplace;
    else if (v == "linear")
      eq.flux = FluxKind::Linear;
    else
      out.push_back({line, col, "[equation] flux must be plaplace|linear"});
  });
  rd.string("equation", "reaction", [&](const std::string& v, int line, int col) {
    if (v == "none")
      eq.reaction = ReactionKind::None;
    else if (v == "power")
      eq.reaction = ReactionKind::Power;
    else if (v == "linear")
      eq.reaction = ReactionKind::Linear;
    else if (v == "sign")
      eq.reaction = ReactionKind::Sign;
    else
      out.push_back({line, col, "[equation] reaction must be none|power|linear|sign"});
  });
  std::optional<SpaceTag> pivot_key;
  rd.string("equation", "pivot", [&](const std::string& v, int line, int col) {
    if (v == "L2")
      pivot_key = SpaceTag::L2;
    else if (v == "Hminus1")
      pivot_key = SpaceTag::Hminus1;
    else if (v == "Rd")
      pivot_key = SpaceTag::Rd;
    else
      out.push_back({line, col, "[equation] pivot must be L2|Hminus1|Rd"});
  });

  // [time] / [solver]
  rd.number("time", "dt", [&](double x) { s.solver.dt = x; });
  rd.number("time", "steps", [&](double x) { s.solver.steps = static_cast<int>(std::llround(x)); });
  rd.number("solver", "newton_tol", [&](double x) { s.solver.newton_tol = x; });
  rd.number("solver", "newton_max", [&](double x) { s.solver.newton_max = static_cast<int>(std::llround(x)); });
  rd.number_array("solver", "yosida_lambda", [&](std::vector<double> xs) { s.solver.yosida_lambda = std::move(xs); });
  rd.boolean("solver", "shift_enabled", [&](bool b) { s.solver.shift_enabled = b; });
  rd.number("solver", "lambda_F", [&](double x) { s.solver.lambda_F = x; });

  // [run]
  rd.number("run", "paths", [&](double x) { s.run.paths = static_cast<int>(std::llround(x)); });
  rd.string("run", "out", [&](const std::string& v, int, int) { s.run.out = v; });
  rd.number("run", "threads", [&](double x) { s.run.threads = static_cast<int>(std::llround(x)); });
  rd.string("run", "ic", [&](const std::string& v, int line, int col) {
    if (v == "zero" || v == "constant" || v == "sin" || v == "step" || v == "bump")
      s.run.ic = v;
    else
      out.push_back({line, col, "[run] ic must be zero|constant|sin|step|bump"});
  });
  rd.number("run", "ic_amplitude", [&](double x) { s.run.ic_amplitude = x; });
  rd.number("run", "ic_k", [&](double x) { s.run.ic_k = static_cast<int>(std::llround(x)); });
  rd.number_array("run", "snapshots", [&](std::vector<double> xs) {
    s.run.snapshots.clear();
    for (double x : xs) s.run.snapshots.push_back(static_cast<int>(std::llround(x)));
  });
  rd.number_array("run", "dts", [&](std::vector<double> xs) { s.run.dts = std::move(xs); });
  rd.string("run", "scheme", [&](const std::string& v, int line, int col) {
    if (v == "rescaled" || v == "em")
      s.run.scheme = v;
    else
      out.push_back({line, col, "[run] scheme must be rescaled|em"});
  });
  rd.number("run", "samples", [&](double x) { s.run.samples = static_cast<int>(std::llround(x)); });
  rd.number("run", "levels", [&](double x) { s.run.levels = static_cast<int>(std::llround(x)); });
  rd.number("run", "bem_max_iters", [&](double x) { s.run.bem_max_iters = static_cast<int>(std::llround(x)); });
  rd.number("run", "bem_tol", [&](double x) { s.run.bem_tol = x; });

  rd.report_unknown_keys();

  // ------------------------------------------------------------------
  // semantic validation; every broken invariant is named
  // ------------------------------------------------------------------
  if (!have_kind) out.push_back({0, 0, "[equation] kind is required"});
  if (!have_modes) out.push_back({0, 0, "[noise] modes is required"});

  if (have_modes) {
    if (truncation < 0) truncation = static_cast<int>(modes.size());
    try {
      s.noise = WienerSpec::make(modes, truncation, s.grid_length);
    } catch (const std::exception& e) {
      out.push_back({0, 0, std::string("[noise] ") + e.what()});
    }
  }

  if (!(s.solver.dt > 0.0)) out.push_back({0, 0, "[time] dt must be positive"});
  if (s.solver.steps < 1) out.push_back({0, 0, "[time] steps must be at least 1"});

  if (have_kind) {
    if (pivot_key) {
      const SpaceTag required = s.equation.pivot;
      if (*pivot_key != required)
        out.push_back({0, 0, "[equation] pivot " + tag_name(*pivot_key) + " violates the invariant: " +
                                 kind_name(eq.kind) + " requires pivot " + tag_name(required)});
    }
    if (eq.kind == EqKind::FiniteDimGraph) {
      eq.dim = s.grid_nodes;  // [grid] nodes doubles as the state dimension
      if (eq.dim < 1) out.push_back({0, 0, "[grid] nodes must be >= 1 for FiniteDimGraph"});
      for (const NoiseMode& m : s.noise.modes)
        if (m.basis != BasisKind::Const)
          out.push_back({0, 0, "[noise] R^d states admit constant-basis modes only"});
    } else {
      if (s.grid_nodes < 3) out.push_back({0, 0, "[grid] nodes must be >= 3"});
      if (!(s.grid_length > 0.0)) out.push_back({0, 0, "[grid] length must be positive"});
      if (eq.kind != EqKind::Transport && s.grid_bc == Bc::Inflow)
        out.push_back({0, 0, "[grid] bc inflow is reserved for Transport"});
    }
    if (out.empty()) {
      try {
        eq.validate(state_space(s));
      } catch (const std::exception& e) {
        out.push_back({0, 0, std::string("[equation] ") + e.what()});
      }
      try {
        s.solver.validate();
      } catch (const std::exception& e) {
        out.push_back({0, 0, std::string("[solver] ") + e.what()});
      }
    }
  }
  if (s.run.paths < 1) out.push_back({0, 0, "[run] paths must be >= 1"});

  if (!out.empty()) throw ScenarioError(std::move(out));
  return s;
}

Space state_space(const Scenario& s) {
  if (s.equation.kind == EqKind::FiniteDimGraph) return Space::rd(s.grid_nodes);
  const Grid g = Grid::make(s.grid_length, s.grid_nodes, s.grid_bc);
  return s.equation.pivot == SpaceTag::Hminus1 ? Space::hminus1(g) : Space::l2(g);
}

Field initial_condition(const Scenario& s) {
  const Space sp = state_space(s);
  Field x(sp, 0.0);
  const double a = s.run.ic_amplitude;
  if (s.run.ic == "zero") return x;
  if (s.run.ic == "constant") {
    for (double& v : x.v) v = a;
    return x;
  }
  if (!sp.spatial()) {
    for (double& v : x.v) v = a;  // sin/step/bump degenerate to constants on R^d
    return x;
  }
  const Grid& g = *sp.grid;
  for (int i = 0; i < x.size(); ++i) {
    const double xi = g.node(i);
    if (s.run.ic == "sin")
      x[i] = a * std::sin(s.run.ic_k * std::numbers::pi * xi / g.length);
    else if (s.run.ic == "step")
      x[i] = (xi < 0.5 * g.length) ? a : 0.0;
    else if (s.run.ic == "bump")
      x[i] = a * std::exp(-50.0 * (xi / g.length - 0.5) * (xi / g.length - 0.5));
  }
  return x;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "[noise]\n";
  os << "modes = [";
  for (std::size_t j = 0; j < s.noise.modes.size(); ++j) {
    const NoiseMode& m = s.noise.modes[j];
    if (j) os << ", ";
    os << "{mu = " << fmt_num(m.mu) << ", basis = \""
       << (m.basis == BasisKind::Const ? "const" : (m.basis == BasisKind::Sin ? "sin" : "cos"))
       << "\", k = " << m.k << "}";
  }
  os << "]\n";
  os << "truncation = " << s.noise.truncation << "\n";
  os << "seed = " << s.seed << "\n\n";

  os << "[grid]\n";
  os << "length = " << fmt_num(s.grid_length) << "\n";
  os << "nodes = " << s.grid_nodes << "\n";
  os << "bc = \"" << (s.grid_bc == Bc::Dirichlet ? "dirichlet" : "inflow") << "\"\n\n";

  os << "[equation]\n";
  os << "kind = \"" << kind_name(s.equation.kind) << "\"\n";
  os << "p = " << fmt_num(s.equation.p) << "\n";
  os << "q = " << fmt_num(s.equation.q) << "\n";
  os << "lambda = " << fmt_num(s.equation.lambda) << "\n";
  os << "flux = \"" << (s.equation.flux == FluxKind::PLaplace ? "plaplace" : "linear") << "\"\n";
  const char* reaction = "none";
  if (s.equation.reaction == ReactionKind::Power) reaction = "power";
  if (s.equation.reaction == ReactionKind::Linear) reaction = "linear";
  if (s.equation.reaction == ReactionKind::Sign) reaction = "sign";
  os << "reaction = \"" << reaction << "\"\n";
  os << "velocity = " << fmt_num(s.equation.velocity_const) << "\n";
  os << "b = " << fmt_num(s.equation.b_const) << "\n";
  os << "pivot = \"" << tag_name(s.equation.pivot) << "\"\n";
  os << "delta = " << fmt_num(s.equation.delta) << "\n\n";

  os << "[time]\n";
  os << "dt = " << fmt_num(s.solver.dt) << "\n";
  os << "steps = " << s.solver.steps << "\n\n";

  os << "[solver]\n";
  os << "newton_tol = " << fmt_num(s.solver.newton_tol) << "\n";
  os << "newton_max = " << s.solver.newton_max << "\n";
  os << "yosida_lambda = [";
  for (std::size_t i = 0; i < s.solver.yosida_lambda.size(); ++i) {
    if (i) os << ", ";
    os << fmt_num(s.solver.yosida_lambda[i]);
  }
  os << "]\n";
  os << "shift_enabled = " << (s.solver.shift_enabled ? "true" : "false") << "\n";
  os << "lambda_F = " << fmt_num(s.solver.lambda_F) << "\n\n";

  os << "[run]\n";
  os << "paths = " << s.run.paths << "\n";
  os << "out = \"" << s.run.out << "\"\n";
  os << "threads = " << s.run.threads << "\n";
  os << "ic = \"" << s.run.ic << "\"\n";
  os << "ic_amplitude = " << fmt_num(s.run.ic_amplitude) << "\n";
  os << "ic_k = " << s.run.ic_k << "\n";
  os << "snapshots = [";
  for (std::size_t i = 0; i < s.run.snapshots.size(); ++i) {
    if (i) os << ", ";
    os << s.run.snapshots[i];
  }
  os << "]\n";
  os << "dts = [";
  for (std::size_t i = 0; i < s.run.dts.size(); ++i) {
    if (i) os << ", ";
    os << fmt_num(s.run.dts[i]);
  }
  os << "]\n";
  os << "scheme = \"" << s.run.scheme << "\"\n";
  os << "samples = " << s.run.samples << "\n";
  os << "levels = " << s.run.levels << "\n";
  os << "bem_max_iters = " << s.run.bem_max_iters << "\n";
  os << "bem_tol = " << fmt_num(s.run.bem_tol) << "\n";
  return os.str();
}

std::uint64_t Scenario::hash() const {
  // identifies the mathematical run; where the files land and how many
  // workers computed them is not part of the identity
  Scenario normalized = *this;
  normalized.run.out = "";
  normalized.run.threads = 0;
  const std::string text = serialize_scenario(normalized);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

bool Scenario::operator==(const Scenario& other) const {
  return serialize_scenario(*this) == serialize_scenario(other);
}

}  // namespace spde
