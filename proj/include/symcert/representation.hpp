#pragma once

// Linear representations of finite groups over R or C.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "symcert/errors.hpp"
#include "symcert/group.hpp"

namespace symcert {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

enum class Field { Real, Complex };

inline constexpr double kDefaultTolRep = 1e-9;
inline constexpr double kDefaultTolLin = 1e-8;

class LinearRepresentation {
 public:
  static LinearRepresentation trusted(GroupPtr group, Field field, std::vector<CMatrix> matrices,
                                      double residual = 0.0) {
    LinearRepresentation r;
    r.group_ = std::move(group);
    r.field_ = field;
    r.dim_ = matrices.empty() ? 0 : std::size_t(matrices.front().rows());
    r.matrices_ = std::move(matrices);
    r.residual_ = residual;
    return r;
  }

  const GroupPtr& group() const { return group_; }
  std::size_t dim() const { return dim_; }
  Field field() const { return field_; }
  const CMatrix& matrix(Element g) const { return matrices_[g]; }
  const std::vector<CMatrix>& matrices() const { return matrices_; }
  /// Largest ||rho(gh) - rho(g)rho(h)||_F seen during validation.
  double homomorphism_residual() const { return residual_; }

  RMatrix real_matrix(Element g) const { return matrices_[g].real(); }

 private:
  LinearRepresentation() = default;
  GroupPtr group_;
  Field field_ = Field::Real;
  std::size_t dim_ = 0;
  std::vector<CMatrix> matrices_;
  double residual_ = 0.0;
};

/// Checks rho(e) = I, rho(gh) = rho(g)rho(h) and invertibility, all in
/// Frobenius norm against `tol_rep`. Pairs are scanned in (g, h) order and
/// the first violation is reported.
inline LinearRepresentation validate_representation(const GroupPtr& g, std::vector<CMatrix> matrices,
                                                    Field field, double tol_rep = kDefaultTolRep) {
  const std::size_t n = g->order();
  if (matrices.size() != n) throw SizeMismatch(n, matrices.size());
  const Eigen::Index d = matrices.front().rows();
  for (const auto& m : matrices)
    if (m.rows() != d || m.cols() != d) throw InvalidArgument("matrices must be square of equal dimension");
  if (field == Field::Real)
    for (auto& m : matrices) {
      if (m.imag().norm() > tol_rep) throw InvalidArgument("real representation has complex entries");
      m = m.real().cast<Complex>();
    }
  for (const auto& m : matrices)
    if (!m.allFinite()) throw InvalidArgument("matrix entries must be finite");

  const double id_res = (matrices[g->identity()] - CMatrix::Identity(d, d)).norm();
  if (id_res > tol_rep) throw IdentityNotMapped(id_res);

  std::vector<double> row_max(n, 0.0);
  std::vector<std::optional<std::pair<Element, double>>> row_bad(n);
  parallel_for(n, [&](std::size_t a) {
    for (Element b = 0; b < n; ++b) {
      const double r = (matrices[g->mul(Element(a), b)] - matrices[a] * matrices[b]).norm();
      row_max[a] = std::max(row_max[a], r);
      if (r > tol_rep && !row_bad[a]) row_bad[a] = std::make_pair(b, r);
    }
  });
  for (std::size_t a = 0; a < n; ++a)
    if (row_bad[a]) throw HomomorphismViolated(a, row_bad[a]->first, row_bad[a]->second);

  for (const auto& m : matrices) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    if (d > 0 && s(d - 1) <= 1e-12 * s(0)) throw InvalidArgument("representation matrix is singular");
  }
  const double residual = *std::max_element(row_max.begin(), row_max.end());
  return LinearRepresentation::trusted(g, field, std::move(matrices), residual);
}

inline LinearRepresentation validate_representation(const GroupPtr& g, const std::vector<RMatrix>& matrices,
                                                    double tol_rep = kDefaultTolRep) {
  std::vector<CMatrix> c;
  c.reserve(matrices.size());
  for (const auto& m : matrices) c.push_back(m.cast<Complex>());
  return validate_representation(g, std::move(c), Field::Real, tol_rep);
}

inline LinearRepresentation trivial_representation(const GroupPtr& g, std::size_t dim,
                                                   Field field = Field::Real) {
  std::vector<CMatrix> m(g->order(), CMatrix::Identity(dim, dim));
  return LinearRepresentation::trusted(g, field, std::move(m));
}

/// Permutation matrices of left multiplication: rho(g) e_x = e_{gx}.
inline LinearRepresentation regular_representation(const GroupPtr& g, Field field = Field::Real) {
  const std::size_t n = g->order();
  std::vector<CMatrix> m(n, CMatrix::Zero(n, n));
  for (Element a = 0; a < n; ++a)
    for (Element x = 0; x < n; ++x) m[a](g->mul(a, x), x) = 1.0;
  return LinearRepresentation::trusted(g, field, std::move(m));
}

inline LinearRepresentation complexify(const LinearRepresentation& r) {
  return LinearRepresentation::trusted(r.group(), Field::Complex, r.matrices(), r.homomorphism_residual());
}

/// Same representation in the basis given by the columns of `basis`:
/// rho'(g) = basis^{-1} rho(g) basis.
inline LinearRepresentation change_basis(const LinearRepresentation& r, const CMatrix& basis) {
  const CMatrix inv = basis.inverse();
  std::vector<CMatrix> m;
  m.reserve(r.matrices().size());
  for (const auto& a : r.matrices()) m.push_back(inv * a * basis);
  return LinearRepresentation::trusted(r.group(), r.field(), std::move(m), r.homomorphism_residual());
}

inline void require_same_group(const LinearRepresentation& a, const LinearRepresentation& b) {
  if (!same_group(a.group(), b.group())) throw GroupMismatch("representations belong to different groups");
  if (a.field() != b.field()) throw GroupMismatch("representations are over different fields");
}

/// Block-diagonal [A 0; 0 B].
inline LinearRepresentation direct_sum(const LinearRepresentation& a, const LinearRepresentation& b) {
  require_same_group(a, b);
  const auto d1 = Eigen::Index(a.dim()), d2 = Eigen::Index(b.dim());
  std::vector<CMatrix> m;
  m.reserve(a.matrices().size());
  for (std::size_t g = 0; g < a.matrices().size(); ++g) {
    CMatrix s = CMatrix::Zero(d1 + d2, d1 + d2);
    s.topLeftCorner(d1, d1) = a.matrix(Element(g));
    s.bottomRightCorner(d2, d2) = b.matrix(Element(g));
    m.push_back(std::move(s));
  }
  return LinearRepresentation::trusted(a.group(), a.field(), std::move(m));
}

/// Kronecker product: block (i, j) of the result is a_ij * B.
inline CMatrix kronecker(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

inline LinearRepresentation tensor_product(const LinearRepresentation& a, const LinearRepresentation& b) {
  require_same_group(a, b);
  std::vector<CMatrix> m;
  m.reserve(a.matrices().size());
  for (std::size_t g = 0; g < a.matrices().size(); ++g)
    m.push_back(kronecker(a.matrix(Element(g)), b.matrix(Element(g))));
  return LinearRepresentation::trusted(a.group(), a.field(), std::move(m));
}

/// Restriction to a subgroup, re-indexed as a representation of that
/// subgroup viewed as a group of its own.
inline LinearRepresentation restrict_to(const LinearRepresentation& r, const Subgroup& h) {
  if (!same_group(h.parent(), r.group())) throw NotASubgroup("subgroup of a different group");
  auto sg = as_group(h);
  std::vector<CMatrix> m;
  for (Element e : sg.embedding) m.push_back(r.matrix(e));
  return LinearRepresentation::trusted(std::make_shared<const FiniteGroup>(std::move(sg.group)), r.field(),
                                       std::move(m), r.homomorphism_residual());
}

struct CharacterTable {
  std::vector<Complex> values;
  /// Largest spread of values within a conjugacy class.
  double class_function_residual = 0.0;

  Complex operator[](Element g) const { return values[g]; }
};

inline CharacterTable character(const LinearRepresentation& r) {
  CharacterTable t;
  for (const auto& m : r.matrices()) t.values.push_back(m.trace());
  for (const auto& cls : conjugacy_classes(*r.group()))
    for (Element e : cls) t.class_function_residual = std::max(t.class_function_residual, std::abs(t[e] - t[cls.front()]));
  return t;
}

/// P = (1/|H|) sum_{h in H} rho(h), the projector onto the vectors H fixes.
inline CMatrix fixed_subspace_projector(const LinearRepresentation& r, const Subgroup& h) {
  if (!same_group(h.parent(), r.group())) throw NotASubgroup("subgroup of a different group");
  CMatrix p = CMatrix::Zero(r.dim(), r.dim());
  for (Element e : h.members()) p += r.matrix(e);
  return p / double(h.order());
}

namespace detail {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
std::vector<Mat<S>> matrices_as(const LinearRepresentation& r) {
  std::vector<Mat<S>> out;
  out.reserve(r.matrices().size());
  for (const auto& m : r.matrices()) {
    if constexpr (std::is_same_v<S, double>)
      out.push_back(m.real());
    else
      out.push_back(m);
  }
  return out;
}

/// Change of basis making the representation unitary: with
/// M = avg rho(g)^* rho(g) and S = M^{1/2}, S rho(g) S^{-1} is unitary.
template <class S>
struct Unitarizer {
  Mat<S> to, from;  // to = S, from = S^{-1}
};

template <class S>
Unitarizer<S> unitarize(const std::vector<Mat<S>>& mats) {
  const auto d = mats.front().rows();
  Mat<S> m = Mat<S>::Zero(d, d);
  for (const auto& a : mats) m += a.adjoint() * a;
  m /= double(mats.size());
  Eigen::SelfAdjointEigenSolver<Mat<S>> es((m + m.adjoint()) / 2.0);
  const auto& v = es.eigenvectors();
  Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::VectorXd inv = sq.cwiseInverse();
  return {v * sq.cast<S>().asDiagonal() * v.adjoint(), v * inv.cast<S>().asDiagonal() * v.adjoint()};
}

/// Orthonormal basis of the eigenvectors of the Hermitian part of `p`
/// whose eigenvalues are at least 1 - tol. For an orthogonal projector this
/// is its range; for a mean of orthogonal projectors it is the intersection
/// of their ranges.
template <class S>
Mat<S> unit_eigenspace(const Mat<S>& p, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat<S>> es((p + p.adjoint()) / 2.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    if (es.eigenvalues()(i) >= 1.0 - tol) keep.push_back(i);
  Mat<S> b(p.rows(), Eigen::Index(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) b.col(Eigen::Index(k)) = es.eigenvectors().col(keep[k]);
  return b;
}

/// Orthonormal basis for the range of a (possibly non-Hermitian) projector.
template <class S>
Mat<S> projector_range(const Mat<S>& p) {
  Eigen::JacobiSVD<Mat<S>> svd(p, Eigen::ComputeThinU);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 0.5) ++rank;
  return svd.matrixU().leftCols(rank);
}

template <class S>
Mat<S> orthonormalize(const Mat<S>& b) {
  if (b.cols() == 0) return b;
  Eigen::HouseholderQR<Mat<S>> qr(b);
  return qr.householderQ() * Mat<S>::Identity(b.rows(), b.cols());
}

template <class S>
CMatrix to_complex(const Mat<S>& m) {
  if constexpr (std::is_same_v<S, double>)
    return m.template cast<Complex>();
  else
    return m;
}

}  // namespace detail

struct SubspaceBlock {
  CMatrix basis;                           // d x d_i, orthonormal columns
  std::optional<std::size_t> factor;       // nullopt: globally fixed ("trivial") block
  std::vector<Complex> character;          // filled by the isotypic decompositions
};

struct SubspaceDecomposition {
  std::vector<SubspaceBlock> blocks;

  std::size_t total_dim() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += std::size_t(b.basis.cols());
    return s;
  }
  std::vector<std::size_t> block_dims() const {
    std::vector<std::size_t> d;
    for (const auto& b : blocks) d.push_back(std::size_t(b.basis.cols()));
    return d;
  }
};

/// Largest ||(I - Q) rho(g) Q||_F over g, where Q projects orthogonally onto
/// span(basis). Zero iff the span is invariant.
inline double invariance_residual(const LinearRepresentation& r, const CMatrix& basis) {
  if (basis.cols() == 0) return 0.0;
  const CMatrix q = detail::orthonormalize<Complex>(basis);
  const CMatrix proj = q * q.adjoint();
  const CMatrix comp = CMatrix::Identity(r.dim(), r.dim()) - proj;
  double worst = 0.0;
  for (const auto& m : r.matrices()) worst = std::max(worst, (comp * m * q).norm());
  return worst;
}

namespace detail {

/// Characters of an abelian group, each stored as an exponent table:
/// chi(g) = exp(2 pi i a(g) / L) with L the group exponent. Ordered
/// lexicographically by the exponents on a greedy generating set.
inline std::vector<std::vector<std::size_t>> abelian_character_exponents(const GroupPtr& g, std::size_t& exponent) {
  const auto gens = Subgroup::whole(g).generators();
  std::vector<std::size_t> orders;
  exponent = 1;
  for (Element s : gens) {
    orders.push_back(g->element_order(s));
    exponent = std::lcm(exponent, orders.back());
  }
  const std::size_t n = g->order();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> k(gens.size(), 0);
  while (true) {
    std::vector<std::size_t> a(n, exponent);  // exponent == unassigned
    a[g->identity()] = 0;
    std::vector<Element> queue{g->identity()};
    bool consistent = true;
    for (std::size_t q = 0; q < queue.size() && consistent; ++q)
      for (std::size_t j = 0; j < gens.size(); ++j) {
        const Element y = g->mul(queue[q], gens[j]);
        const std::size_t v = (a[queue[q]] + k[j] * (exponent / orders[j])) % exponent;
        if (a[y] == exponent) {
          a[y] = v;
          queue.push_back(y);
        } else if (a[y] != v) {
          consistent = false;
          break;
        }
      }
    if (consistent) out.push_back(std::move(a));
    std::size_t j = gens.size();
    while (j-- > 0) {
      if (++k[j] < orders[j]) break;
      k[j] = 0;
    }
    if (j == std::size_t(-1) || gens.empty()) break;
  }
  return out;
}

inline std::vector<Complex> character_values(const std::vector<std::size_t>& a, std::size_t exponent) {
  std::vector<Complex> v;
  v.reserve(a.size());
  for (std::size_t x : a) v.push_back(std::polar(1.0, 2.0 * std::numbers::pi * double(x) / double(exponent)));
  return v;
}

}  // namespace detail

/// Irreducible characters of an abelian group (all one-dimensional).
inline std::vector<std::vector<Complex>> abelian_characters(const GroupPtr& g) {
  if (!is_abelian(*g)) throw NonAbelianUnsupported();
  std::size_t exponent = 1;
  std::vector<std::vector<Complex>> out;
  for (const auto& a : detail::abelian_character_exponents(g, exponent))
    out.push_back(detail::character_values(a, exponent));
  return out;
}

/// Splits a complex representation of an abelian group into its isotypic
/// components, one block per character that occurs. Each block is the
/// range of P_chi = (1/|G|) sum_g conj(chi(g)) rho(g).
inline SubspaceDecomposition isotypic_decomposition(const LinearRepresentation& r) {
  if (r.field() != Field::Complex) throw InvalidArgument("isotypic decomposition needs a complex representation");
  if (!is_abelian(*r.group())) throw NonAbelianUnsupported();
  using M = detail::Mat<Complex>;
  auto mats = detail::matrices_as<Complex>(r);
  auto u = detail::unitarize(mats);
  for (auto& m : mats) m = u.to * m * u.from;

  SubspaceDecomposition out;
  for (const auto& chi : abelian_characters(r.group())) {
    M p = M::Zero(r.dim(), r.dim());
    for (std::size_t e = 0; e < mats.size(); ++e) p += std::conj(chi[e]) * mats[e];
    p /= double(mats.size());
    const auto mult = std::llround(p.trace().real());
    if (mult <= 0) continue;
    M basis = detail::projector_range<Complex>(p);
    out.blocks.push_back({detail::orthonormalize<Complex>(M(u.from * basis)), std::nullopt, chi});
  }
  return out;
}

/// Real counterpart: conjugate characters are paired so that each block is
/// the real span of the chi and conj(chi) components.
inline SubspaceDecomposition real_isotypic_decomposition(const LinearRepresentation& r) {
  if (r.field() != Field::Real) throw InvalidArgument("real isotypic decomposition needs a real representation");
  if (!is_abelian(*r.group())) throw NonAbelianUnsupported();
  auto mats = detail::matrices_as<double>(r);
  auto u = detail::unitarize(mats);
  for (auto& m : mats) m = u.to * m * u.from;

  const auto chars = abelian_characters(r.group());
  std::vector<char> used(chars.size(), 0);
  SubspaceDecomposition out;
  for (std::size_t c = 0; c < chars.size(); ++c) {
    if (used[c]) continue;
    used[c] = 1;
    std::vector<Complex> conj(chars[c].size());
    for (std::size_t e = 0; e < conj.size(); ++e) conj[e] = std::conj(chars[c][e]);
    std::size_t partner = c;
    for (std::size_t o = c + 1; o < chars.size(); ++o) {
      double diff = 0.0;
      for (std::size_t e = 0; e < conj.size(); ++e) diff = std::max(diff, std::abs(chars[o][e] - conj[e]));
      if (!used[o] && diff < 1e-12) {
        partner = o;
        used[o] = 1;
        break;
      }
    }
    RMatrix p = RMatrix::Zero(r.dim(), r.dim());
    for (std::size_t e = 0; e < mats.size(); ++e) {
      const double w = partner == c ? chars[c][e].real() : 2.0 * chars[c][e].real();
      p += w * mats[e];
    }
    p /= double(mats.size());
    if (std::llround(p.trace()) <= 0) continue;
    RMatrix basis = detail::projector_range<double>(p);
    out.blocks.push_back({detail::orthonormalize<double>(RMatrix(u.from * basis)).cast<Complex>(), std::nullopt,
                          chars[c]});
  }
  return out;
}

struct RepresentationVerdict {
  bool disentangled = false;
  SubspaceDecomposition decomposition;
  /// dim - (dim Z_0 + sum_i dim Z_i); zero when disentangled.
  std::size_t deficit = 0;
  /// ||B^* B - I||_F for the concatenated bases in the invariant metric.
  double orthonormality_residual = 0.0;
  /// Largest invariance defect over all blocks.
  double invariance_residual = 0.0;
};

namespace detail {

template <class S>
RepresentationVerdict disentangle(const LinearRepresentation& r, const DirectProductDecomposition& d, double tol) {
  using M = Mat<S>;
  const auto dim = Eigen::Index(r.dim());
  auto mats = matrices_as<S>(r);
  auto u = unitarize(mats);
  for (auto& m : mats) m = u.to * m * u.from;

  auto average = [&](const std::vector<Element>& members) {
    M p = M::Zero(dim, dim);
    for (Element e : members) p += mats[e];
    return M(p / double(members.size()));
  };

  std::vector<Element> everything(r.group()->order());
  std::iota(everything.begin(), everything.end(), 0);
  const M b0 = unit_eigenspace<S>(average(everything), tol);
  const M q0 = b0 * b0.adjoint();
  const M id = M::Identity(dim, dim);

  std::vector<M> factor_proj;
  for (const auto& f : d.factors()) factor_proj.push_back(average(f.members()));

  RepresentationVerdict v;
  std::vector<M> bases{b0};
  if (b0.cols() > 0) v.decomposition.blocks.push_back({to_complex<S>(M(u.from * b0)), std::nullopt, {}});
  for (std::size_t i = 0; i < d.arity(); ++i) {
    M p = id;
    for (std::size_t j = 0; j < d.arity(); ++j)
      if (j != i) p = p * factor_proj[j];
    const M range = unit_eigenspace<S>(M((p + p.adjoint()) / 2.0), tol);
    const M qi = range * range.adjoint();
    const M bi = unit_eigenspace<S>(M((qi + (id - q0)) / 2.0), tol);
    bases.push_back(bi);
    if (bi.cols() > 0) v.decomposition.blocks.push_back({to_complex<S>(M(u.from * bi)), i, {}});
  }

  Eigen::Index total = 0;
  for (const auto& b : bases) total += b.cols();
  M all(dim, total);
  Eigen::Index at = 0;
  for (const auto& b : bases) {
    all.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  v.orthonormality_residual = total > 0 ? (all.adjoint() * all - M::Identity(total, total)).norm() : 0.0;
  v.deficit = total <= dim ? std::size_t(dim - total) : 0;
  for (const auto& b : bases) {
    if (b.cols() == 0) continue;
    const M comp = id - b * b.adjoint();
    for (const auto& m : mats) v.invariance_residual = std::max(v.invariance_residual, double((comp * m * b).norm()));
  }
  v.disentangled = total == dim && v.orthonormality_residual <= 10.0 * tol && v.invariance_residual <= 10.0 * tol;
  return v;
}

}  // namespace detail

/// Certifies rho against G = G_1 x ... x G_k. Z_0 is the subspace fixed by
/// all of G; Z_i is the subspace fixed by every factor except G_i, minus
/// Z_0. Disentangled iff these fill the space. The check runs in a basis
/// where rho is unitary, so the verdict does not depend on the coordinates
/// of the input.
inline RepresentationVerdict is_disentangled_representation(const LinearRepresentation& r,
                                                            const DirectProductDecomposition& d,
                                                            double tol_lin = kDefaultTolLin) {
  if (!same_group(r.group(), d.parent()))
    throw DecompositionMismatch("decomposition does not decompose the representation's group");
  if (r.dim() == 0) return {true, {}, 0, 0.0, 0.0};
  if (r.field() == Field::Real) return detail::disentangle<double>(r, d, tol_lin);
  return detail::disentangle<Complex>(r, d, tol_lin);
}

}  // namespace symcert
