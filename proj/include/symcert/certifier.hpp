#pragma once

// Certification of a representation table f: W -> Z against a symmetry
// group acting on W and a chosen direct-product decomposition.

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "symcert/action.hpp"
#include "symcert/errors.hpp"
#include "symcert/group.hpp"
#include "symcert/representation.hpp"
#include "symcert/table.hpp"

namespace symcert {

struct Tolerances {
  double eq = 1e-9;  // equivariance / collision tolerance; 1e-6 suits imported learned tables
  double nl = 1e-3;  // off-factor sensitivity, relative to the dimension's own maximum
  double rep = kDefaultTolRep;
  double lin = kDefaultTolLin;
};

inline constexpr double kImportedTolEq = 1e-6;

// ------------------------------------------------------------------ well-definedness

struct IllDefinedWitness {
  std::size_t w1, w2;  // merged states
  Element g;           // whose images under g are not merged
};

struct WellDefinedness {
  bool well_defined = true;
  std::vector<std::pair<std::size_t, std::size_t>> collisions;  // (state, class representative)
  std::optional<IllDefinedWitness> witness;
  std::vector<std::size_t> state_class;   // class id per state, classes ordered by smallest member
  std::vector<std::size_t> representative;  // smallest state per class
};

inline void require_covers(const RepresentationTable& f, const FiniteAction& a) {
  if (f.size() != a.set_size()) throw SizeMismatch(a.set_size(), f.size());
}

/// Merges states whose vectors lie within tol_eq and checks that every
/// group element maps merged states to merged states, i.e. that the induced
/// action on f(W) exists.
inline WellDefinedness check_well_defined(const RepresentationTable& f, const FiniteAction& a, double tol_eq) {
  require_covers(f, a);
  const std::size_t m = f.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  // Sweep along the first coordinate; only nearby rows can collide.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  if (f.dim() > 0)
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return f.rows()(Eigen::Index(i), 0) < f.rows()(Eigen::Index(j), 0); });
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = p + 1; q < m; ++q) {
      const auto i = Eigen::Index(order[p]), j = Eigen::Index(order[q]);
      if (f.dim() > 0 && f.rows()(j, 0) - f.rows()(i, 0) > tol_eq) break;
      if ((f.rows().row(i) - f.rows().row(j)).norm() <= tol_eq) {
        auto ri = find(order[p]), rj = find(order[q]);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }

  WellDefinedness out;
  out.state_class.assign(m, 0);
  std::vector<std::size_t> class_of_root(m, m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto r = find(s);
    if (class_of_root[r] == m) {
      class_of_root[r] = out.representative.size();
      out.representative.push_back(s);
    } else {
      out.collisions.emplace_back(s, out.representative[class_of_root[r]]);
    }
    out.state_class[s] = class_of_root[r];
  }
  if (out.collisions.empty()) return out;

  for (Element g = 0; g < a.group()->order(); ++g)
    for (const auto& [s, rep] : out.collisions)
      if (out.state_class[a.apply(g, Point(s))] != out.state_class[a.apply(g, Point(rep))]) {
        out.well_defined = false;
        out.witness = IllDefinedWitness{rep, s, g};
        return out;
      }
  return out;
}

// ------------------------------------------------------------------ induced action

struct InducedAction {
  FiniteAction action;                    // on image points
  std::vector<std::size_t> state_to_point;
  Eigen::MatrixXd points;                 // one row per image point
};

/// g . z = f(g . f^{-1}(z)) on the deduplicated image.
inline InducedAction induce_action_on_image(const RepresentationTable& f, const FiniteAction& a, double tol_eq) {
  auto wd = check_well_defined(f, a, tol_eq);
  if (!wd.well_defined)
    throw IllDefined("induced action is ill-defined: states " + std::to_string(wd.witness->w1) + " and " +
                     std::to_string(wd.witness->w2) + " are merged but element " +
                     std::to_string(wd.witness->g) + " separates them");
  const std::size_t k = wd.representative.size(), n = a.group()->order();
  std::vector<Point> table(n * k);
  for (Element g = 0; g < n; ++g)
    for (std::size_t p = 0; p < k; ++p)
      table[g * k + p] = Point(wd.state_class[a.apply(g, Point(wd.representative[p]))]);
  Eigen::MatrixXd points(Eigen::Index(k), Eigen::Index(f.dim()));
  for (std::size_t p = 0; p < k; ++p) points.row(Eigen::Index(p)) = f.rows().row(Eigen::Index(wd.representative[p]));
  return {validate_action(a.group(), k, table), std::move(wd.state_class), std::move(points)};
}

// ------------------------------------------------------------------ equivariance

struct EquivarianceResult {
  double max_residual = 0.0;
  Element worst_element = 0;
  std::size_t worst_state = 0;

  bool passes(double tol) const { return max_residual <= tol; }
};

/// max over (g, w) of ||rho(g) f(w) - f(g . w)|| with one matrix per element.
inline EquivarianceResult verify_equivariance(const RepresentationTable& f, const FiniteAction& a,
                                              const std::vector<RMatrix>& z_action) {
  require_covers(f, a);
  if (z_action.size() != a.group()->order()) throw SizeMismatch(a.group()->order(), z_action.size());
  const RMatrix fx = f.rows().transpose();  // d x |W|
  std::vector<EquivarianceResult> per(z_action.size());
  parallel_for(z_action.size(), [&](std::size_t g) {
    const RMatrix moved = z_action[g] * fx;
    for (std::size_t s = 0; s < f.size(); ++s) {
      const double r =
          (moved.col(Eigen::Index(s)) - fx.col(Eigen::Index(a.apply(Element(g), Point(s))))).norm();
      if (r > per[g].max_residual) per[g] = {r, Element(g), s};
    }
  });
  EquivarianceResult out;
  for (const auto& p : per)
    if (p.max_residual > out.max_residual) out = p;
  return out;
}

/// Same check with the action on Z given as a table on image points.
inline EquivarianceResult verify_equivariance(const RepresentationTable& f, const FiniteAction& a,
                                              const InducedAction& z_action) {
  require_covers(f, a);
  EquivarianceResult out;
  for (Element g = 0; g < a.group()->order(); ++g)
    for (std::size_t s = 0; s < f.size(); ++s) {
      const auto p = z_action.action.apply(g, Point(z_action.state_to_point[s]));
      const double r = (z_action.points.row(Eigen::Index(p)) - f.rows().row(Eigen::Index(a.apply(g, Point(s))))).norm();
      if (r > out.max_residual) out = {r, g, s};
    }
  return out;
}

// ------------------------------------------------------------------ linear fit

struct FittedLinearAction {
  std::vector<Element> generators;
  std::vector<RMatrix> generator_matrices;
  std::vector<RMatrix> element_matrices;     // extended to the whole group along generator words
  std::vector<double> generator_residuals;   // max_w ||A_s f(w) - f(s w)|| per generator
  double homomorphism_residual = 0.0;
  double equivariance_residual = 0.0;
  double relative_equivariance_residual = 0.0;  // divided by max_w ||f(w)||
  std::size_t rank = 0;                      // rank of the latent data
  bool supplied = false;                     // matrices came from the caller, not a fit
};

namespace detail {

inline double table_scale(const RepresentationTable& f) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.rows().rows(); ++i) s = std::max(s, f.rows().row(i).norm());
  return s > 0.0 ? s : 1.0;
}

inline std::size_t numeric_rank(const RMatrix& x, RMatrix* left_vectors = nullptr) {
  Eigen::JacobiSVD<RMatrix> svd(x, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  std::size_t r = 0;
  const double cut = s.size() > 0 ? std::max(s(0) * 1e-10 * double(std::max(x.rows(), x.cols())), 1e-300) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  if (left_vectors) *left_vectors = svd.matrixU().leftCols(Eigen::Index(r));
  return r;
}

/// Extends generator matrices to every element: rho(x s) = rho(x) rho(s).
inline std::vector<RMatrix> extend_to_group(const FiniteGroup& g, const std::vector<Element>& gens,
                                            const std::vector<RMatrix>& mats, Eigen::Index dim) {
  std::vector<RMatrix> out(g.order());
  std::vector<char> done(g.order(), 0);
  out[g.identity()] = RMatrix::Identity(dim, dim);
  done[g.identity()] = 1;
  std::vector<Element> queue{g.identity()};
  for (std::size_t q = 0; q < queue.size(); ++q)
    for (std::size_t j = 0; j < gens.size(); ++j) {
      const Element y = g.mul(queue[q], gens[j]);
      if (!done[y]) {
        done[y] = 1;
        out[y] = out[queue[q]] * mats[j];
        queue.push_back(y);
      }
    }
  if (queue.size() != g.order()) throw InvalidArgument("generators do not generate the group");
  return out;
}

/// Relation defects: s^{ord s} = e, commuting generator pairs, and
/// rho(gh) = rho(g) rho(h) on all pairs (or a fixed stride sample of them).
inline double relation_defect(const FiniteGroup& g, const std::vector<Element>& gens,
                              const std::vector<RMatrix>& gen_mats, const std::vector<RMatrix>& all) {
  const Eigen::Index d = all.front().rows();
  double worst = 0.0;
  for (std::size_t j = 0; j < gens.size(); ++j) {
    RMatrix p = RMatrix::Identity(d, d);
    for (std::size_t k = 0; k < g.element_order(gens[j]); ++k) p = p * gen_mats[j];
    worst = std::max(worst, (p - RMatrix::Identity(d, d)).norm());
    for (std::size_t k = j + 1; k < gens.size(); ++k)
      if (g.mul(gens[j], gens[k]) == g.mul(gens[k], gens[j]))
        worst = std::max(worst, (gen_mats[j] * gen_mats[k] - gen_mats[k] * gen_mats[j]).norm());
  }
  const std::size_t n = g.order(), pairs = n * n, budget = 1 << 16;
  const std::size_t stride = pairs <= budget ? 1 : pairs / budget + 1;
  for (std::size_t p = 0; p < pairs; p += stride) {
    const Element a = Element(p / n), b = Element(p % n);
    worst = std::max(worst, (all[g.mul(a, b)] - all[a] * all[b]).norm());
  }
  return worst;
}

inline FittedLinearAction assess(const RepresentationTable& f, const FiniteAction& a, std::vector<Element> gens,
                                 std::vector<RMatrix> gen_mats, std::size_t rank, bool supplied) {
  FittedLinearAction out;
  out.rank = rank;
  out.supplied = supplied;
  const RMatrix fx = f.rows().transpose();
  for (std::size_t j = 0; j < gens.size(); ++j) {
    double r = 0.0;
    const RMatrix moved = gen_mats[j] * fx;
    for (std::size_t s = 0; s < f.size(); ++s)
      r = std::max(r, (moved.col(Eigen::Index(s)) - fx.col(Eigen::Index(a.apply(gens[j], Point(s))))).norm());
    out.generator_residuals.push_back(r);
  }
  out.element_matrices = extend_to_group(*a.group(), gens, gen_mats, Eigen::Index(f.dim()));
  out.homomorphism_residual = relation_defect(*a.group(), gens, gen_mats, out.element_matrices);
  out.equivariance_residual = verify_equivariance(f, a, out.element_matrices).max_residual;
  out.relative_equivariance_residual = out.equivariance_residual / table_scale(f);
  out.generators = std::move(gens);
  out.generator_matrices = std::move(gen_mats);
  return out;
}

}  // namespace detail

/// Least-squares matrix per generator: A_s = Y X^T (X X^T)^{-1} with X the
/// d x |W| latent data and Y its image under s. With `allow_rank_deficient`
/// the fit runs inside span(f(W)) and is extended by the identity on the
/// orthogonal complement; otherwise a rank below d raises RankDeficient.
inline FittedLinearAction fit_linear_action(const RepresentationTable& f, const FiniteAction& a,
                                            const std::vector<Element>& generators,
                                            bool allow_rank_deficient = false) {
  require_covers(f, a);
  const Eigen::Index d = Eigen::Index(f.dim());
  const RMatrix x = f.rows().transpose();
  RMatrix u;
  const std::size_t rank = detail::numeric_rank(x, &u);
  if (rank < f.dim() && !allow_rank_deficient) throw RankDeficient(rank, f.dim());

  std::vector<RMatrix> mats;
  for (Element s : generators) {
    RMatrix y(d, x.cols());
    for (std::size_t w = 0; w < f.size(); ++w) y.col(Eigen::Index(w)) = x.col(Eigen::Index(a.apply(s, Point(w))));
    if (rank == f.dim()) {
      const RMatrix gram = x * x.transpose();
      mats.push_back(gram.ldlt().solve(x * y.transpose()).transpose());
    } else if (rank == 0) {
      mats.push_back(RMatrix::Identity(d, d));
    } else {
      const RMatrix cx = u.transpose() * x, cy = u.transpose() * y;
      const RMatrix gram = cx * cx.transpose();
      const RMatrix ar = gram.ldlt().solve(cx * cy.transpose()).transpose();
      mats.push_back(u * ar * u.transpose() + (RMatrix::Identity(d, d) - u * u.transpose()));
    }
  }
  return detail::assess(f, a, generators, std::move(mats), rank, false);
}

/// Residuals of a caller-supplied linear action given by generator matrices.
inline FittedLinearAction assess_linear_action(const RepresentationTable& f, const FiniteAction& a,
                                               const std::vector<Element>& generators,
                                               const std::vector<RMatrix>& generator_matrices) {
  require_covers(f, a);
  if (generator_matrices.size() != generators.size())
    throw SizeMismatch(generators.size(), generator_matrices.size());
  for (const auto& m : generator_matrices)
    if (m.rows() != Eigen::Index(f.dim()) || m.cols() != Eigen::Index(f.dim()))
      throw InvalidArgument("supplied action matrices must be dim x dim");
  return detail::assess(f, a, generators, generator_matrices, detail::numeric_rank(f.rows().transpose()), true);
}

// ------------------------------------------------------------------ certification

struct Metrics {
  std::vector<std::optional<double>> modularity;  // per latent dimension; nullopt = dropped
  std::vector<std::size_t> dropped_dimensions;
  std::vector<std::size_t> compactness;           // latent dimensions assigned per factor
  std::optional<double> explicitness;             // R^2 against the ground-truth table
};

struct CertificationReport {
  WellDefinedness well_definedness;
  double induced_equivariance_residual = 0.0;
  std::optional<FittedLinearAction> linear_fit;
  std::optional<std::string> linear_fit_failure;
  bool linear_fit_passed = false;
  std::optional<RepresentationVerdict> linear_verdict;
  std::vector<std::vector<double>> sensitivity;             // [factor][dimension]
  std::vector<std::optional<std::size_t>> coordinate_assignment;  // per dimension; nullopt = trivial
  bool coordinate_verdict = false;
  bool verdict_disentangled = false;
  bool verdict_linear_disentangled = false;
  Metrics metrics;

  /// The equivariance residual of the Z-action the verdict relies on.
  double equivariance_residual() const {
    return linear_fit_passed ? linear_fit->equivariance_residual : induced_equivariance_residual;
  }
  std::vector<std::size_t> block_dims() const {
    return linear_verdict ? linear_verdict->decomposition.block_dims() : std::vector<std::size_t>{};
  }
};

struct CertifyOptions {
  Tolerances tol;
  /// A linear Z-action given by the caller, one matrix per generator of
  /// `generators`. When absent the action is fitted.
  std::optional<std::vector<RMatrix>> supplied_action;
  /// Defaults to the concatenated factor generators.
  std::vector<Element> generators;
  /// Ground-truth coordinates used for explicitness.
  std::optional<RepresentationTable> ground_truth;
};

/// S[i][k] = max over states and generators s of factor i of |f(s w)_k - f(w)_k|.
inline std::vector<std::vector<double>> sensitivity_table(const RepresentationTable& f, const FiniteAction& a,
                                                          const DirectProductDecomposition& d) {
  require_covers(f, a);
  std::vector<std::vector<double>> s(d.arity(), std::vector<double>(f.dim(), 0.0));
  for (std::size_t i = 0; i < d.arity(); ++i)
    for (Element g : d.factors()[i].generators())
      for (std::size_t w = 0; w < f.size(); ++w) {
        const auto diff = (f.rows().row(Eigen::Index(a.apply(g, Point(w)))) - f.rows().row(Eigen::Index(w))).cwiseAbs();
        for (std::size_t k = 0; k < f.dim(); ++k) s[i][k] = std::max(s[i][k], diff(Eigen::Index(k)));
      }
  return s;
}

namespace detail {

/// Dimension k is inert when no factor moves it by more than tol_eq
/// relative to its own magnitude.
inline bool inert(const RepresentationTable& f, const std::vector<std::vector<double>>& s, std::size_t k,
                  double tol_eq) {
  double top = 0.0;
  for (const auto& row : s) top = std::max(top, row[k]);
  const double mag = f.rows().col(Eigen::Index(k)).cwiseAbs().maxCoeff();
  return top <= tol_eq * std::max(1.0, mag);
}

/// Affine least squares from f to the ground truth; R^2 summed over target
/// columns, clamped to [0, 1].
inline double r_squared(const RepresentationTable& f, const RepresentationTable& truth) {
  if (truth.size() != f.size()) throw SizeMismatch(f.size(), truth.size());
  RMatrix x(f.rows().rows(), f.rows().cols() + 1);
  x.leftCols(f.rows().cols()) = f.rows();
  x.col(f.rows().cols()).setOnes();
  const RMatrix& y = truth.rows();
  const RMatrix coef = x.colPivHouseholderQr().solve(y);
  const double ss_res = (x * coef - y).squaredNorm();
  const double ss_tot = (y.rowwise() - y.colwise().mean()).squaredNorm();
  if (ss_tot <= 0.0) return ss_res <= 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

}  // namespace detail

/// Modularity, compactness and explicitness from a sensitivity table.
inline Metrics compute_metrics(const RepresentationTable& f, const std::vector<std::vector<double>>& sens,
                               const std::vector<std::optional<std::size_t>>& assignment,
                               std::size_t factors, const Tolerances& tol,
                               const std::optional<RepresentationTable>& ground_truth) {
  Metrics m;
  m.compactness.assign(factors, 0);
  for (std::size_t k = 0; k < f.dim(); ++k) {
    if (!assignment[k] || detail::inert(f, sens, k, tol.eq)) {
      m.modularity.push_back(std::nullopt);
      m.dropped_dimensions.push_back(k);
      continue;
    }
    ++m.compactness[*assignment[k]];
    std::vector<double> col;
    for (const auto& row : sens) col.push_back(row[k]);
    std::sort(col.rbegin(), col.rend());
    const double second = col.size() > 1 ? col[1] : 0.0;
    m.modularity.push_back(second <= tol.nl * col[0] ? 1.0 : 1.0 - second / col[0]);
  }
  if (ground_truth) m.explicitness = detail::r_squared(f, *ground_truth);
  return m;
}

/// Full pipeline: well-definedness, linear fit (or the supplied action),
/// projector certification when the linear action holds up, otherwise the
/// coordinate-sensitivity test, then metrics.
inline CertificationReport certify(const RepresentationTable& f, const FiniteAction& a,
                                   const DirectProductDecomposition& d, const CertifyOptions& opt = {}) {
  require_covers(f, a);
  if (!same_group(a.group(), d.parent())) throw DecompositionMismatch("decomposition is for a different group");
  const auto& tol = opt.tol;
  CertificationReport rep;

  rep.well_definedness = check_well_defined(f, a, tol.eq);
  if (rep.well_definedness.well_defined)
    rep.induced_equivariance_residual = verify_equivariance(f, a, induce_action_on_image(f, a, tol.eq)).max_residual;

  std::vector<Element> gens = opt.generators;
  if (gens.empty())
    for (const auto& fac : d.factors())
      for (Element s : fac.generators()) gens.push_back(s);

  try {
    rep.linear_fit = opt.supplied_action ? assess_linear_action(f, a, gens, *opt.supplied_action)
                                         : fit_linear_action(f, a, gens, /*allow_rank_deficient=*/true);
  } catch (const Error& e) {
    rep.linear_fit_failure = e.what();
  }

  if (rep.linear_fit) {
    const auto& fit = *rep.linear_fit;
    double gen_norm = 1.0;
    for (const auto& m : fit.generator_matrices) gen_norm = std::max(gen_norm, m.norm());
    rep.linear_fit_passed = rep.well_definedness.well_defined && fit.relative_equivariance_residual <= tol.eq &&
                            fit.homomorphism_residual <= tol.eq * gen_norm;
    if (!rep.linear_fit_passed && !rep.linear_fit_failure)
      rep.linear_fit_failure = "linear action misses tolerance: relative equivariance residual " +
                               std::to_string(fit.relative_equivariance_residual) + ", homomorphism residual " +
                               std::to_string(fit.homomorphism_residual);
  }

  if (rep.linear_fit_passed) {
    const auto& fit = *rep.linear_fit;
    std::vector<CMatrix> mats;
    for (const auto& m : fit.element_matrices) mats.push_back(m.cast<Complex>());
    auto rho = LinearRepresentation::trusted(a.group(), Field::Real, std::move(mats), fit.homomorphism_residual);
    const double tol_lin =
        std::max(tol.lin, 10.0 * std::max(fit.homomorphism_residual, fit.relative_equivariance_residual));
    rep.linear_verdict = is_disentangled_representation(rho, d, tol_lin);
  }

  rep.sensitivity = sensitivity_table(f, a, d);
  rep.coordinate_assignment.assign(f.dim(), std::nullopt);
  bool coords_ok = true;
  for (std::size_t k = 0; k < f.dim(); ++k) {
    if (detail::inert(f, rep.sensitivity, k, tol.eq)) continue;
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.arity(); ++i)
      if (rep.sensitivity[i][k] > rep.sensitivity[best][k]) best = i;
    rep.coordinate_assignment[k] = best;
    for (std::size_t i = 0; i < d.arity(); ++i)
      if (i != best && rep.sensitivity[i][k] > tol.nl * rep.sensitivity[best][k]) coords_ok = false;
  }
  rep.coordinate_verdict = rep.well_definedness.well_defined && coords_ok;

  if (rep.linear_fit_passed) {
    rep.verdict_linear_disentangled = rep.linear_verdict->disentangled;
    rep.verdict_disentangled = rep.verdict_linear_disentangled;
  } else {
    rep.verdict_linear_disentangled = false;
    rep.verdict_disentangled = rep.coordinate_verdict;
  }

  rep.metrics = compute_metrics(f, rep.sensitivity, rep.coordinate_assignment, d.arity(), tol, opt.ground_truth);
  return rep;
}

}  // namespace symcert
