#include "holodisc/polynomial.hpp"
#include "holodisc/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace holodisc {

namespace {

struct Piece {
  std::string_view text;
  int column; // 1-based column of text[0] inside the line
};

std::vector<Piece> split(std::string_view text, char sep, int column_offset) {
  std::vector<Piece> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back({text.substr(start, i - start), column_offset + static_cast<int>(start) + 1});
      start = i + 1;
    }
  }
  return out;
}

Piece trim(Piece p) {
  std::size_t b = 0;
  while (b < p.text.size() && std::isspace(static_cast<unsigned char>(p.text[b]))) ++b;
  std::size_t e = p.text.size();
  while (e > b && std::isspace(static_cast<unsigned char>(p.text[e - 1]))) --e;
  return {p.text.substr(b, e - b), p.column + static_cast<int>(b)};
}

// Splits on whitespace, keeping columns.
std::vector<Piece> tokens(Piece p) {
  std::vector<Piece> out;
  std::size_t i = 0;
  while (i < p.text.size()) {
    while (i < p.text.size() && std::isspace(static_cast<unsigned char>(p.text[i]))) ++i;
    std::size_t s = i;
    while (i < p.text.size() && !std::isspace(static_cast<unsigned char>(p.text[i]))) ++i;
    if (i > s) out.push_back({p.text.substr(s, i - s), p.column + static_cast<int>(s)});
  }
  return out;
}

double parse_double(Piece p, int line) {
  std::string s(p.text);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw ParseError("expected a decimal number, got '" + s + "'", line, p.column);
  return v;
}

int parse_int(std::string_view s, int line, int column) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line, column);
  return v;
}

// Parses a product of factors "<prefix><k>[^p]" where prefix is matched from
// the allowed list; returns powers per prefix.
std::vector<std::vector<int>> parse_monomial(Piece p, int n, const std::vector<std::string>& prefixes,
                                             int line) {
  std::vector<std::vector<int>> powers(prefixes.size(), std::vector<int>(static_cast<std::size_t>(n), 0));
  std::string compact;
  std::vector<int> cols;
  for (std::size_t i = 0; i < p.text.size(); ++i) {
    if (!std::isspace(static_cast<unsigned char>(p.text[i]))) {
      compact.push_back(p.text[i]);
      cols.push_back(p.column + static_cast<int>(i));
    }
  }
  if (compact.empty() || compact == "1") return powers;
  std::size_t start = 0;
  while (start <= compact.size()) {
    std::size_t end = compact.find('*', start);
    if (end == std::string::npos) end = compact.size();
    std::string_view factor(compact.data() + start, end - start);
    const int col = start < cols.size() ? cols[start] : p.column;
    if (factor.empty()) throw ParseError("empty factor in monomial", line, col);
    // Longest prefix first so "zb" wins over "z".
    int which = -1;
    std::size_t plen = 0;
    for (std::size_t k = 0; k < prefixes.size(); ++k) {
      if (factor.substr(0, prefixes[k].size()) == prefixes[k] && prefixes[k].size() > plen &&
          factor.size() > prefixes[k].size() &&
          std::isdigit(static_cast<unsigned char>(factor[prefixes[k].size()]))) {
        which = static_cast<int>(k);
        plen = prefixes[k].size();
      }
    }
    if (which < 0) throw ParseError("unknown factor '" + std::string(factor) + "'", line, col);
    std::string_view rest = factor.substr(plen);
    std::size_t caret = rest.find('^');
    int index = parse_int(rest.substr(0, caret), line, col);
    int power = caret == std::string_view::npos ? 1 : parse_int(rest.substr(caret + 1), line, col);
    if (index < 1 || index > n)
      throw ParseError("variable index " + std::to_string(index) + " out of range 1.." + std::to_string(n),
                       line, col);
    if (power < 0) throw ParseError("negative power", line, col);
    powers[static_cast<std::size_t>(which)][static_cast<std::size_t>(index - 1)] += power;
    start = end + 1;
  }
  return powers;
}

cplx ipow(cplx a, int k) {
  cplx r = 1.0;
  for (int j = 0; j < k; ++j) r *= a;
  return r;
}

double ipow(double a, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= a;
  return r;
}

} // namespace

Polynomial::Polynomial(int n, std::vector<Monomial> terms) : n_(n), terms_(std::move(terms)) {
  for (const auto& m : terms_)
    if (static_cast<int>(m.z_powers.size()) != n || static_cast<int>(m.zbar_powers.size()) != n)
      throw Error(ErrorCode::InvalidArgument, "monomial dimension mismatch");
}

Polynomial Polynomial::constant(int n, cplx c) {
  if (c == cplx{}) return Polynomial(n);
  Monomial m{c, std::vector<int>(static_cast<std::size_t>(n), 0),
             std::vector<int>(static_cast<std::size_t>(n), 0)};
  return Polynomial(n, {m});
}

cplx Polynomial::operator()(const CVector& z) const {
  cplx sum{};
  for (const auto& m : terms_) {
    cplx v = m.coefficient;
    for (int j = 0; j < n_; ++j) {
      if (m.z_powers[j]) v *= ipow(z(j), m.z_powers[j]);
      if (m.zbar_powers[j]) v *= ipow(std::conj(z(j)), m.zbar_powers[j]);
    }
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::dz(int j) const {
  std::vector<Monomial> out;
  for (const auto& m : terms_) {
    if (m.z_powers[j] == 0) continue;
    Monomial d = m;
    d.coefficient *= static_cast<double>(m.z_powers[j]);
    d.z_powers[j] -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::dzbar(int j) const {
  std::vector<Monomial> out;
  for (const auto& m : terms_) {
    if (m.zbar_powers[j] == 0) continue;
    Monomial d = m;
    d.coefficient *= static_cast<double>(m.zbar_powers[j]);
    d.zbar_powers[j] -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::parse(std::string_view text, int n, int line, int column_offset) {
  std::vector<Monomial> terms;
  for (Piece raw : split(text, ';', column_offset)) {
    Piece term = trim(raw);
    if (term.text.empty()) continue;
    auto toks = tokens(term);
    if (toks.size() < 2)
      throw ParseError("term needs a real and an imaginary coefficient", line, term.column);
    const double re = parse_double(toks[0], line);
    const double im = parse_double(toks[1], line);
    Piece mono{{}, toks[1].column + static_cast<int>(toks[1].text.size())};
    if (toks.size() > 2) {
      const std::size_t b = static_cast<std::size_t>(toks[2].column - term.column);
      mono = {term.text.substr(b), toks[2].column};
    }
    auto powers = parse_monomial(mono, n, {"z", "zb"}, line);
    terms.push_back({cplx(re, im), powers[0], powers[1]});
  }
  return Polynomial(n, std::move(terms));
}

RealPolynomial::RealPolynomial(int n, std::vector<RealMonomial> terms) : n_(n), terms_(std::move(terms)) {
  for (const auto& m : terms_)
    if (static_cast<int>(m.powers.size()) != n)
      throw Error(ErrorCode::InvalidArgument, "monomial dimension mismatch");
}

double RealPolynomial::operator()(std::span<const double> y) const {
  double sum = 0.0;
  for (const auto& m : terms_) {
    double v = m.coefficient;
    for (int j = 0; j < n_; ++j) v *= ipow(y[j], m.powers[j]);
    sum += v;
  }
  return sum;
}

RVector RealPolynomial::gradient(std::span<const double> y) const {
  RVector g = RVector::Zero(n_);
  for (const auto& m : terms_) {
    for (int k = 0; k < n_; ++k) {
      if (m.powers[k] == 0) continue;
      double v = m.coefficient * m.powers[k];
      for (int j = 0; j < n_; ++j) v *= ipow(y[j], j == k ? m.powers[j] - 1 : m.powers[j]);
      g(k) += v;
    }
  }
  return g;
}

RealPolynomial RealPolynomial::parse(std::string_view text, int n, int line, int column_offset) {
  std::vector<RealMonomial> terms;
  for (Piece raw : split(text, ';', column_offset)) {
    Piece term = trim(raw);
    if (term.text.empty()) continue;
    auto toks = tokens(term);
    const double c = parse_double(toks[0], line);
    Piece mono{{}, toks[0].column + static_cast<int>(toks[0].text.size())};
    if (toks.size() > 1) {
      const std::size_t b = static_cast<std::size_t>(toks[1].column - term.column);
      mono = {term.text.substr(b), toks[1].column};
    }
    auto powers = parse_monomial(mono, n, {"y"}, line);
    terms.push_back({c, powers[0]});
  }
  return RealPolynomial(n, std::move(terms));
}

RealPolynomial RealPolynomial::quadratic(int n, double eps) {
  std::vector<RealMonomial> terms;
  for (int j = 0; j < n; ++j) {
    RealMonomial m{eps, std::vector<int>(static_cast<std::size_t>(n), 0)};
    m.powers[static_cast<std::size_t>(j)] = 2;
    terms.push_back(m);
  }
  return RealPolynomial(n, std::move(terms));
}

} // namespace holodisc
