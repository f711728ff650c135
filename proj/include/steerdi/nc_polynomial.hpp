#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "steerdi/linalg.hpp"

namespace steerdi {

/// Word in the projector alphabet of the self-testing scenario: Bob letters
/// 1..6 (one projector per dichotomic setting) and Charlie letters 1..3.
/// Canonical form: the two parties commute so their letters are kept in
/// separate party-sorted segments, adjacent equal projectors collapse
/// (idempotence), and the identity is the empty word.
struct MonomialWord {
  std::vector<std::uint8_t> bob;
  std::vector<std::uint8_t> charlie;

  bool is_identity() const { return bob.empty() && charlie.empty(); }
  size_t length() const { return bob.size() + charlie.size(); }

  friend bool operator==(const MonomialWord& a, const MonomialWord& b) {
    return a.bob == b.bob && a.charlie == b.charlie;
  }
  friend bool operator<(const MonomialWord& a, const MonomialWord& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    if (a.bob != b.bob) return a.bob < b.bob;
    return a.charlie < b.charlie;
  }

  MonomialWord adjoint() const {
    MonomialWord w = *this;
    std::reverse(w.bob.begin(), w.bob.end());
    std::reverse(w.charlie.begin(), w.charlie.end());
    return w;
  }

  /// Hermitian-pair representative; moments are real so <w> = <w^dag> and the
  /// class is keyed on the smaller of the two.
  MonomialWord hermitian_rep() const {
    MonomialWord adj = adjoint();
    return adj < *this ? adj : *this;
  }

  static std::vector<std::uint8_t> concat_collapse(const std::vector<std::uint8_t>& a,
                                                   const std::vector<std::uint8_t>& b) {
    std::vector<std::uint8_t> out = a;
    for (std::uint8_t v : b) {
      if (!out.empty() && out.back() == v) continue;  // projector idempotence
      out.push_back(v);
    }
    return out;
  }

  friend MonomialWord operator*(const MonomialWord& a, const MonomialWord& b) {
    MonomialWord w;
    w.bob = concat_collapse(a.bob, b.bob);
    w.charlie = concat_collapse(a.charlie, b.charlie);
    return w;
  }

  std::string str() const {
    if (is_identity()) return "1";
    std::string s;
    for (std::uint8_t v : bob) s += "B" + std::to_string(static_cast<int>(v)) + " ";
    for (std::uint8_t v : charlie) s += "C" + std::to_string(static_cast<int>(v)) + " ";
    s.pop_back();
    return s;
  }

  static MonomialWord identity() { return {}; }
  static MonomialWord bob_letter(int y) {
    MonomialWord w;
    w.bob.push_back(static_cast<std::uint8_t>(y));
    return w;
  }
  static MonomialWord charlie_letter(int z) {
    MonomialWord w;
    w.charlie.push_back(static_cast<std::uint8_t>(z));
    return w;
  }
};

/// Polynomial over monomial words with complex coefficients. Products use the
/// projector rewriting rules above; tiny coefficients are pruned on the fly.
class NcPolynomial {
 public:
  NcPolynomial() = default;
  explicit NcPolynomial(double scalar) {
    if (scalar != 0.0) terms_[MonomialWord::identity()] = scalar;
  }
  static NcPolynomial word(MonomialWord w, cplx coeff = 1.0) {
    NcPolynomial p;
    if (coeff != cplx{}) p.terms_[std::move(w)] = coeff;
    return p;
  }

  const std::map<MonomialWord, cplx>& terms() const { return terms_; }

  NcPolynomial& operator+=(const NcPolynomial& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  NcPolynomial& operator-=(const NcPolynomial& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  NcPolynomial& operator*=(cplx s) {
    if (s == cplx{}) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= s;
    return *this;
  }

  friend NcPolynomial operator+(NcPolynomial a, const NcPolynomial& b) { return a += b; }
  friend NcPolynomial operator-(NcPolynomial a, const NcPolynomial& b) { return a -= b; }
  friend NcPolynomial operator*(NcPolynomial a, cplx s) { return a *= s; }
  friend NcPolynomial operator*(cplx s, NcPolynomial a) { return a *= s; }

  friend NcPolynomial operator*(const NcPolynomial& a, const NcPolynomial& b) {
    NcPolynomial out;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) out.add_term(wa * wb, ca * cb);
    return out;
  }

  NcPolynomial adjoint() const {
    NcPolynomial out;
    for (const auto& [w, c] : terms_) out.add_term(w.adjoint(), std::conj(c));
    return out;
  }

  bool is_hermitian(double eps = 1e-10) const {
    for (const auto& [w, c] : terms_) {
      const auto it = terms_.find(w.adjoint());
      const cplx other = (it == terms_.end()) ? cplx{} : it->second;
      if (std::abs(std::conj(c) - other) > eps) return false;
    }
    return true;
  }

  double max_imag() const {
    double m = 0;
    for (const auto& [w, c] : terms_) m = std::max(m, std::abs(c.imag()));
    return m;
  }

  void add_term(const MonomialWord& w, cplx c) {
    auto it = terms_.find(w);
    if (it == terms_.end()) {
      if (std::abs(c) > 1e-15) terms_[w] = c;
      return;
    }
    it->second += c;
    if (std::abs(it->second) < 1e-15) terms_.erase(it);
  }

 private:
  std::map<MonomialWord, cplx> terms_;
};

/// Dichotomic observables in projector form: O = 2 P - 1.
inline NcPolynomial bob_observable_poly(int y) {
  if (y < 1 || y > 6) throw std::invalid_argument("bob_observable_poly: setting out of range");
  return NcPolynomial::word(MonomialWord::bob_letter(y), 2.0) + NcPolynomial(-1.0);
}
inline NcPolynomial charlie_observable_poly(int z) {
  if (z < 1 || z > 3) throw std::invalid_argument("charlie_observable_poly: setting out of range");
  return NcPolynomial::word(MonomialWord::charlie_letter(z), 2.0) + NcPolynomial(-1.0);
}

/// Numeric evaluation of a word against an explicit realization: a state on
/// B (x) C with 2x2 dichotomic observables per setting. Projector letters are
/// (I+O)/2.
struct Realization {
  DenseOperator rho_bc;                      // 4x4
  std::array<DenseOperator, 6> bob_obs;      // settings 1..6
  std::array<DenseOperator, 3> charlie_obs;  // settings 1..3
};

inline cplx word_moment(const MonomialWord& w, const Realization& r) {
  const DenseOperator id = DenseOperator::identity(2);
  DenseOperator pb = id, pc = id;
  for (std::uint8_t y : w.bob) pb = pb * ((id + r.bob_obs[static_cast<size_t>(y - 1)]) * cplx(0.5, 0));
  for (std::uint8_t z : w.charlie) pc = pc * ((id + r.charlie_obs[static_cast<size_t>(z - 1)]) * cplx(0.5, 0));
  return trace_of_product(kron(pb, pc), r.rho_bc);
}

inline cplx poly_moment(const NcPolynomial& p, const Realization& r) {
  cplx s = 0;
  for (const auto& [w, c] : p.terms()) s += c * word_moment(w, r);
  return s;
}

}  // namespace steerdi
