#include "holodisc/io.hpp"
#include "holodisc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace holodisc::io {

namespace {

struct Line {
  int number;          // 1-based
  int indent;          // column of the first content character, 0-based
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Non-empty lines with comments removed.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view raw = text.substr(start, end - start);
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view t = trim(raw);
    if (!t.empty()) out.push_back({number, static_cast<int>(t.data() - raw.data()), t});
    start = end + 1;
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::pair<std::string_view, std::string_view> head_word(std::string_view s) {
  const auto sp = s.find_first_of(" \t");
  if (sp == std::string_view::npos) return {s, {}};
  return {s.substr(0, sp), trim(s.substr(sp))};
}

int column_of(const Line& l, std::string_view part) {
  return l.indent + static_cast<int>(part.data() - l.text.data()) + 1;
}

double to_double(std::string_view s, int line, int col) {
  s = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError("expected a number, got '" + std::string(s) + "'", line, col);
  return v;
}

int to_int(std::string_view s, int line, int col) {
  s = trim(s);
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line, col);
  return v;
}

int read_dim(const Line& l, std::string_view rest) {
  const int n = to_int(rest, l.number, column_of(l, rest));
  if (n < 1) throw ParseError("dimension must be positive", l.number, column_of(l, rest));
  return n;
}

// "<index> : <body>" or "<index> = <body>", index 1-based and <= n.
std::pair<int, std::string_view> indexed(const Line& l, std::string_view rest, char sep, int n) {
  const auto pos = rest.find(sep);
  if (pos == std::string_view::npos)
    throw ParseError(std::string("expected '") + sep + "'", l.number, column_of(l, rest));
  const std::string_view idx = trim(rest.substr(0, pos));
  const int j = to_int(idx, l.number, column_of(l, rest));
  if (n > 0 && (j < 1 || j > n)) throw ParseError("index out of range", l.number, column_of(l, rest));
  return {j, trim(rest.substr(pos + 1))};
}

} // namespace

std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open input file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write output file '" + path + "'");
  out << content;
}

// --------------------------------------------------------------- structure

ComplexMatrixField structure_from_catalog(std::string_view spec, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  std::vector<std::string_view> words;
  for (auto w : split(trim(spec), ' '))
    if (!trim(w).empty()) words.push_back(trim(w));
  const Line l{1, 0, spec};
  if (words.empty()) throw ParseError("empty structure spec", 1, 1);
  const auto& kind = words[0];
  auto num = [&](std::size_t i) { return to_double(words[i], 1, column_of(l, words[i])); };
  if (kind == "zero" && words.size() == 1) return ComplexMatrixField::zero(n);
  if (kind == "const" && (words.size() == 2 || words.size() == 3)) {
    const cplx a(num(1), words.size() == 3 ? num(2) : 0.0);
    if (a == cplx{}) return ComplexMatrixField::zero(n);
    return ComplexMatrixField::constant(a * CMatrix::Identity(n, n));
  }
  if (kind == "linear" && (words.size() == 2 || words.size() == 3)) {
    const cplx c(num(1), words.size() == 3 ? num(2) : 0.0);
    std::vector<CMatrix> b(static_cast<std::size_t>(n), CMatrix::Zero(n, n));
    b[0] = c * CMatrix::Identity(n, n);
    return ComplexMatrixField::linear(std::move(b));
  }
  throw ParseError("unknown structure spec '" + std::string(spec) + "' (zero | const a [b] | linear c [d])", 1, 1);
}

ComplexMatrixField parse_structure(std::string_view text) {
  int n = 0;
  std::map<std::pair<int, int>, Polynomial> entries;
  for (const Line& l : content_lines(text)) {
    const auto [word, rest] = head_word(l.text);
    if (word == "n") {
      if (n) throw ParseError("dimension given twice", l.number, 1);
      n = read_dim(l, rest);
    } else if (word == "entry") {
      if (!n) throw ParseError("'n' must precede the entries", l.number, l.indent + 1);
      const auto colon = rest.find(':');
      if (colon == std::string_view::npos) throw ParseError("expected ':'", l.number, column_of(l, rest));
      std::vector<std::string_view> ij;
      for (auto w : split(trim(rest.substr(0, colon)), ' '))
        if (!trim(w).empty()) ij.push_back(trim(w));
      if (ij.size() != 2) throw ParseError("expected 'entry i j : polynomial'", l.number, column_of(l, rest));
      const int i = to_int(ij[0], l.number, column_of(l, ij[0]));
      const int j = to_int(ij[1], l.number, column_of(l, ij[1]));
      if (i < 1 || i > n || j < 1 || j > n) throw ParseError("entry index out of range", l.number, column_of(l, ij[0]));
      const std::string_view body = rest.substr(colon + 1);
      if (entries.count({i, j})) throw ParseError("entry given twice", l.number, column_of(l, ij[0]));
      entries[{i, j}] = Polynomial::parse(body, n, l.number, column_of(l, body) - 1);
    } else {
      throw ParseError("unknown keyword '" + std::string(word) + "'", l.number, l.indent + 1);
    }
  }
  if (!n) throw ParseError("missing 'n <dim>'", 1, 1);
  std::vector<std::vector<Polynomial>> rows(static_cast<std::size_t>(n),
                                            std::vector<Polynomial>(static_cast<std::size_t>(n), Polynomial(n)));
  for (auto& [ij, p] : entries) rows[static_cast<std::size_t>(ij.first - 1)][static_cast<std::size_t>(ij.second - 1)] = p;
  if (entries.empty()) return ComplexMatrixField::zero(n);
  return ComplexMatrixField::polynomial(std::move(rows));
}

ComplexMatrixField load_structure(const std::string& arg, int n) {
  std::ifstream probe(arg);
  if (probe) {
    ComplexMatrixField a = parse_structure(read_file(arg));
    if (a.dimension() != n)
      throw Error(ErrorCode::ConfigError, "structure file '" + arg + "' has dimension " +
                                              std::to_string(a.dimension()) + ", expected " + std::to_string(n));
    return a;
  }
  return structure_from_catalog(arg, n);
}

// ------------------------------------------------------------------- wedge

WedgeDomain parse_wedge(std::string_view text) {
  int n = 0;
  double delta = 0.1;
  bool model = false;
  std::optional<std::string> a_spec;
  int a_line = 0;
  std::map<int, RealPolynomial> graph;
  std::map<int, ScalarField> rho;
  int first_line = 1;
  for (const Line& l : content_lines(text)) {
    const auto [word, rest] = head_word(l.text);
    if (word == "dim") {
      if (n) throw ParseError("dimension given twice", l.number, l.indent + 1);
      n = read_dim(l, rest);
      continue;
    }
    if (!n) throw ParseError("'dim' must come first", l.number, l.indent + 1);
    if (word == "delta") {
      delta = to_double(rest, l.number, column_of(l, rest));
      if (!(delta >= 0.0)) throw ParseError("delta must be nonnegative", l.number, column_of(l, rest));
    } else if (word == "model") {
      if (!rest.empty()) throw ParseError("'model' takes no arguments", l.number, column_of(l, rest));
      model = true;
    } else if (word == "A") {
      a_spec = std::string(rest);
      a_line = l.number;
    } else if (word == "graph") {
      const auto [j, body] = indexed(l, rest, ':', n);
      if (graph.count(j)) throw ParseError("graph component given twice", l.number, column_of(l, rest));
      graph.emplace(j, RealPolynomial::parse(body, n, l.number, column_of(l, body) - 1));
    } else if (word == "rho") {
      const auto [j, body] = indexed(l, rest, ':', 0);
      if (rho.count(j)) throw ParseError("defining function given twice", l.number, column_of(l, rest));
      const Expression e = Expression::parse(body, coordinate_variables(n), l.number, column_of(l, body) - 1);
      rho.emplace(j, ScalarField::from_expression(e, n));
    } else {
      throw ParseError("unknown keyword '" + std::string(word) + "'", l.number, l.indent + 1);
    }
    first_line = l.number;
  }
  if (!n) throw ParseError("missing 'dim <n>'", 1, 1);
  const int kinds = (model ? 1 : 0) + (graph.empty() ? 0 : 1) + (rho.empty() ? 0 : 1);
  if (kinds != 1) throw ParseError("exactly one of 'model', 'graph' or 'rho' lines is required", first_line, 1);
  ComplexMatrixField a = ComplexMatrixField::zero(n);
  if (a_spec) {
    try {
      a = structure_from_catalog(*a_spec, n);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), a_line, 1);
    }
  }
  if (model) {
    if (!a_spec || a.is_zero()) return WedgeDomain::model(n, delta);
    return WedgeDomain::graph(std::vector<RealPolynomial>(static_cast<std::size_t>(n), RealPolynomial(n)), a, delta);
  }
  if (!graph.empty()) {
    if (static_cast<int>(graph.size()) != n) throw ParseError("a graph wedge needs one 'graph' line per coordinate", 1, 1);
    std::vector<RealPolynomial> h;
    for (auto& [j, p] : graph) h.push_back(p);
    return WedgeDomain::graph(std::move(h), a, delta);
  }
  std::vector<ScalarField> fields;
  for (auto& [j, f] : rho) fields.push_back(f);
  return WedgeDomain::general(std::move(fields), a, delta);
}

// ------------------------------------------------------------------- curve

fatou::Curve parse_curve(std::string_view text) {
  int n = 0;
  std::map<int, Expression> comps;
  for (const Line& l : content_lines(text)) {
    const auto [word, rest] = head_word(l.text);
    if (word == "dim") {
      n = read_dim(l, rest);
    } else if (word == "gamma") {
      if (!n) throw ParseError("'dim' must come first", l.number, l.indent + 1);
      const auto [j, body] = indexed(l, rest, '=', n);
      comps[j] = Expression::parse(body, {"t"}, l.number, column_of(l, body) - 1);
    } else {
      throw ParseError("unknown keyword '" + std::string(word) + "'", l.number, l.indent + 1);
    }
  }
  if (!n) throw ParseError("missing 'dim <n>'", 1, 1);
  if (static_cast<int>(comps.size()) != n) throw ParseError("curve needs one 'gamma' line per coordinate", 1, 1);
  std::vector<Expression> e;
  for (auto& [j, x] : comps) e.push_back(x);
  return fatou::Curve{[e](double t) {
                        CVector z(static_cast<Eigen::Index>(e.size()));
                        const cplx tc(t, 0.0);
                        for (std::size_t j = 0; j < e.size(); ++j)
                          z(static_cast<Eigen::Index>(j)) = e[j].evaluate(std::span<const cplx>(&tc, 1));
                        return z;
                      },
                      std::string(trim(text))};
}

// ----------------------------------------------------------- test function

fatou::TestFunction parse_test_function(std::string_view text) {
  int n = 0;
  std::optional<std::string> expr;
  int expr_line = 0, expr_col = 0;
  std::optional<double> sup, dbar;
  std::optional<fatou::TestFunction> builtin;
  for (const Line& l : content_lines(text)) {
    const auto [word, rest] = head_word(l.text);
    if (word == "dim") {
      n = read_dim(l, rest);
    } else if (word == "F") {
      const auto eq = rest.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected 'F = expression'", l.number, column_of(l, rest));
      const std::string_view body = trim(rest.substr(eq + 1));
      expr = std::string(body);
      expr_line = l.number;
      expr_col = column_of(l, body) - 1;
    } else if (word == "sup_bound") {
      sup = to_double(rest, l.number, column_of(l, rest));
    } else if (word == "dbar_bound") {
      dbar = to_double(rest, l.number, column_of(l, rest));
    } else if (word == "builtin") {
      if (!n) throw ParseError("'dim' must come first", l.number, l.indent + 1);
      const auto [name, arg] = head_word(rest);
      const double eps = arg.empty() ? 0.1 : to_double(arg, l.number, column_of(l, arg));
      if (name == "power_i") builtin = fatou::TestFunction::power_i(n);
      else if (name == "power_i_perturbed") builtin = fatou::TestFunction::power_i_perturbed(n, eps);
      else if (name == "exp_perturbed") builtin = fatou::TestFunction::exp_perturbed(n, eps);
      else throw ParseError("unknown built-in '" + std::string(name) + "'", l.number, column_of(l, rest));
    } else {
      throw ParseError("unknown keyword '" + std::string(word) + "'", l.number, l.indent + 1);
    }
  }
  if (!n) throw ParseError("missing 'dim <n>'", 1, 1);
  if (builtin) {
    if (expr) throw ParseError("give either 'builtin' or 'F', not both", expr_line, 1);
    return *builtin;
  }
  if (!expr) throw ParseError("missing 'F = expression'", 1, 1);
  if (!sup || !dbar) throw ParseError("an expression needs 'sup_bound' and 'dbar_bound'", expr_line, 1);
  const Expression e = Expression::parse(*expr, coordinate_variables(n), expr_line, expr_col);
  if (!(*sup > 0.0) || !(*dbar >= 0.0)) throw ParseError("bounds must be positive", expr_line, 1);
  return fatou::TestFunction{ScalarField::from_expression(e, n), *sup, *dbar, {}, *expr};
}

// --------------------------------------------------------------------- CSV

namespace {

std::vector<double> csv_numbers(const Line& l, std::size_t expected) {
  std::vector<double> v;
  for (auto f : split(l.text, ',')) v.push_back(to_double(f, l.number, column_of(l, trim(f).empty() ? f : trim(f))));
  if (expected && v.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " fields, got " + std::to_string(v.size()), l.number, 1);
  return v;
}

GridPtr csv_grid(double n_r, double n_theta, const Line& l) {
  if (n_r != std::floor(n_r) || n_theta != std::floor(n_theta) || n_r > 1e5 || n_theta > 1e5)
    throw ParseError("grid sizes must be integers", l.number, 1);
  try {
    return DiscGrid::create(static_cast<int>(n_r), static_cast<int>(n_theta));
  } catch (const Error& e) {
    throw ParseError(e.what(), l.number, 1);
  }
}

int csv_index(double x, int hi, const Line& l) {
  if (x != std::floor(x) || x < 0 || x > hi) throw ParseError("index out of range", l.number, 1);
  return static_cast<int>(x);
}

} // namespace

std::string write_grid_csv(const GridFunction& f) {
  const GridPtr& g = f.grid();
  std::ostringstream os;
  os << "n_r,n_theta\n" << g->n_r() << ',' << g->n_theta() << '\n';
  for (int j = 0; j < g->n_r(); ++j)
    for (int k = 0; k < g->n_theta(); ++k)
      os << j << ',' << k << ',' << format_double(f(j, k).real()) << ',' << format_double(f(j, k).imag()) << '\n';
  if (f.boundary())
    for (int k = 0; k < g->n_theta(); ++k)
      os << g->n_r() << ',' << k << ',' << format_double((*f.boundary())(k).real()) << ','
         << format_double((*f.boundary())(k).imag()) << '\n';
  return os.str();
}

GridFunction parse_grid_csv(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.size() < 2 || trim(lines[0].text) != "n_r,n_theta") throw ParseError("expected header 'n_r,n_theta'", 1, 1);
  const auto dims = csv_numbers(lines[1], 2);
  const GridPtr g = csv_grid(dims[0], dims[1], lines[1]);
  GridFunction f(g);
  CVector b(g->n_theta());
  std::vector<char> seen(g->size() + static_cast<std::size_t>(g->n_theta()), 0);
  bool boundary = false;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto v = csv_numbers(lines[i], 4);
    const int j = csv_index(v[0], g->n_r(), lines[i]), k = csv_index(v[1], g->n_theta() - 1, lines[i]);
    auto& s = seen[static_cast<std::size_t>(j) * g->n_theta() + k];
    if (s) throw ParseError("node given twice", lines[i].number, 1);
    s = 1;
    if (j == g->n_r()) {
      b(k) = {v[2], v[3]};
      boundary = true;
    } else {
      f(j, k) = {v[2], v[3]};
    }
  }
  for (std::size_t i = 0; i < g->size(); ++i)
    if (!seen[i]) throw ParseError("missing grid node " + std::to_string(i), static_cast<int>(lines.size()), 1);
  if (boundary) {
    for (std::size_t i = g->size(); i < seen.size(); ++i)
      if (!seen[i]) throw ParseError("incomplete boundary trace", static_cast<int>(lines.size()), 1);
    f.set_boundary(b);
  }
  return f;
}

std::string write_disc_csv(const DiscMap& z) {
  const GridPtr& g = z.grid();
  const int n = z.dimension();
  std::ostringstream os;
  os << "n,n_r,n_theta\n" << n << ',' << g->n_r() << ',' << g->n_theta() << '\n';
  auto row = [&](int j, int k, const CVector& p) {
    os << j << ',' << k;
    for (int c = 0; c < n; ++c) os << ',' << format_double(p(c).real()) << ',' << format_double(p(c).imag());
    os << '\n';
  };
  for (int j = 0; j < g->n_r(); ++j)
    for (int k = 0; k < g->n_theta(); ++k) row(j, k, z.at_node(j, k));
  const bool traced = std::all_of(z.components().begin(), z.components().end(),
                                  [](const GridFunction& c) { return c.boundary().has_value(); });
  if (traced)
    for (int k = 0; k < g->n_theta(); ++k) row(g->n_r(), k, z.boundary(k));
  return os.str();
}

DiscMap parse_disc_csv(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.size() < 2 || trim(lines[0].text) != "n,n_r,n_theta") throw ParseError("expected header 'n,n_r,n_theta'", 1, 1);
  const auto dims = csv_numbers(lines[1], 3);
  const int n = static_cast<int>(dims[0]);
  if (n < 1) throw ParseError("dimension must be positive", lines[1].number, 1);
  const GridPtr g = csv_grid(dims[1], dims[2], lines[1]);
  std::vector<GridFunction> comps(static_cast<std::size_t>(n), GridFunction(g));
  CMatrix b(n, g->n_theta());
  std::vector<char> seen(g->size() + static_cast<std::size_t>(g->n_theta()), 0);
  bool boundary = false;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto v = csv_numbers(lines[i], static_cast<std::size_t>(2 + 2 * n));
    const int j = csv_index(v[0], g->n_r(), lines[i]), k = csv_index(v[1], g->n_theta() - 1, lines[i]);
    auto& s = seen[static_cast<std::size_t>(j) * g->n_theta() + k];
    if (s) throw ParseError("node given twice", lines[i].number, 1);
    s = 1;
    for (int c = 0; c < n; ++c) {
      const cplx x(v[static_cast<std::size_t>(2 + 2 * c)], v[static_cast<std::size_t>(3 + 2 * c)]);
      if (j == g->n_r()) b(c, k) = x;
      else comps[static_cast<std::size_t>(c)](j, k) = x;
    }
    boundary = boundary || j == g->n_r();
  }
  for (std::size_t i = 0; i < g->size(); ++i)
    if (!seen[i]) throw ParseError("missing grid node " + std::to_string(i), static_cast<int>(lines.size()), 1);
  if (boundary) {
    for (std::size_t i = g->size(); i < seen.size(); ++i)
      if (!seen[i]) throw ParseError("incomplete boundary trace", static_cast<int>(lines.size()), 1);
    for (int c = 0; c < n; ++c) comps[static_cast<std::size_t>(c)].set_boundary(b.row(c).transpose());
  }
  return DiscMap(g, std::move(comps));
}

std::vector<cplx> parse_points_csv(std::string_view text) {
  std::vector<cplx> out;
  for (const Line& l : content_lines(text)) {
    if (l.text == "re,im") continue;
    const auto v = csv_numbers(l, 2);
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

std::string write_values_csv(std::span<const cplx> points, std::span<const cplx> values) {
  std::ostringstream os;
  os << "re_zeta,im_zeta,re,im\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    os << format_double(points[i].real()) << ',' << format_double(points[i].imag()) << ','
       << format_double(values[i].real()) << ',' << format_double(values[i].imag()) << '\n';
  return os.str();
}

BoundaryFunction parse_boundary_csv(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.size() < 2 || trim(lines[0].text) != "n_theta") throw ParseError("expected header 'n_theta'", 1, 1);
  const int nt = to_int(lines[1].text, lines[1].number, 1);
  if (nt < DiscGrid::kMinAngular || nt % 2) throw ParseError("n_theta must be even and at least 4", lines[1].number, 1);
  BoundaryFunction phi;
  phi.samples = CVector::Zero(nt);
  phi.real_valued = true;
  std::vector<char> seen(static_cast<std::size_t>(nt), 0);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto v = csv_numbers(lines[i], 0);
    if (v.size() != 2 && v.size() != 3) throw ParseError("expected 'k,re' or 'k,re,im'", lines[i].number, 1);
    const int k = csv_index(v[0], nt - 1, lines[i]);
    if (seen[static_cast<std::size_t>(k)]) throw ParseError("sample given twice", lines[i].number, 1);
    seen[static_cast<std::size_t>(k)] = 1;
    phi.samples(k) = {v[1], v.size() == 3 ? v[2] : 0.0};
    if (v.size() == 3 && v[2] != 0.0) phi.real_valued = false;
  }
  for (int k = 0; k < nt; ++k)
    if (!seen[static_cast<std::size_t>(k)]) throw ParseError("missing sample " + std::to_string(k), static_cast<int>(lines.size()), 1);
  return phi;
}

} // namespace holodisc::io
