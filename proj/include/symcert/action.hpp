#pragma once

// Group actions on finite sets and the disentangled-action test.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "symcert/errors.hpp"
#include "symcert/group.hpp"

namespace symcert {

using Point = std::uint32_t;

inline constexpr std::size_t kActionSearchGuard = 4096;

class FiniteAction {
 public:
  static FiniteAction trusted(GroupPtr group, std::size_t set_size, std::vector<Point> table) {
    FiniteAction a;
    a.group_ = std::move(group);
    a.set_size_ = set_size;
    a.table_ = std::move(table);
    return a;
  }

  const GroupPtr& group() const { return group_; }
  std::size_t set_size() const { return set_size_; }
  Point apply(Element g, Point x) const { return table_[std::size_t(g) * set_size_ + x]; }
  std::span<const Point> table() const { return table_; }

 private:
  FiniteAction() = default;
  GroupPtr group_;
  std::size_t set_size_ = 0;
  std::vector<Point> table_;
};

/// Verifies e.x = x and (gh).x = g.(h.x) exactly; `table` is row-major |G| x m.
inline FiniteAction validate_action(const GroupPtr& g, std::size_t set_size, std::span<const Point> table) {
  const std::size_t n = g->order();
  if (table.size() != n * set_size) throw SizeMismatch(n * set_size, table.size());
  for (Point p : table)
    if (p >= set_size) throw InvalidArgument("action table entry out of range: " + std::to_string(p));
  auto at = [&](std::size_t e, std::size_t x) { return table[e * set_size + x]; };
  for (std::size_t x = 0; x < set_size; ++x)
    if (at(g->identity(), x) != x) throw IdentityAxiomViolated(x);
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) {
      const Element ab = g->mul(a, b);
      for (std::size_t x = 0; x < set_size; ++x)
        if (at(ab, x) != at(a, at(b, x))) throw CompatibilityViolated(a, b, x);
    }
  return FiniteAction::trusted(g, set_size, std::vector<Point>(table.begin(), table.end()));
}

/// Bijection X <-> X_1 x ... x X_k. A point's coordinates pair with the
/// lexicographic index sum_i c_i * prod_{j>i} m_j.
class ProductStructure {
 public:
  /// `coords` holds k coordinates per point, point-major.
  ProductStructure(std::vector<std::size_t> factor_sizes, std::vector<std::size_t> coords)
      : sizes_(std::move(factor_sizes)), coords_(std::move(coords)) {
    if (sizes_.empty()) throw InvalidArgument("product structure needs at least one factor");
    std::size_t total = 1;
    for (auto s : sizes_) total *= s;
    const std::size_t k = sizes_.size();
    if (coords_.size() != total * k)
      throw InvalidArgument("product structure does not cover the set: factor sizes multiply to " +
                            std::to_string(total));
    point_of_.assign(total, total);
    for (std::size_t x = 0; x < total; ++x) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t c = coords_[x * k + i];
        if (c >= sizes_[i]) throw InvalidArgument("coordinate out of range");
        idx = idx * sizes_[i] + c;
      }
      if (point_of_[idx] != total) throw InvalidArgument("coder is not injective");
      point_of_[idx] = Point(x);
    }
  }

  /// Lexicographic coder: point index is the tuple index itself.
  static ProductStructure lexicographic(std::vector<std::size_t> factor_sizes) {
    std::size_t total = 1;
    for (auto s : factor_sizes) total *= s;
    const std::size_t k = factor_sizes.size();
    std::vector<std::size_t> coords(total * k);
    for (std::size_t x = 0; x < total; ++x) {
      std::size_t rem = x;
      for (std::size_t i = k; i-- > 0;) {
        coords[x * k + i] = rem % factor_sizes[i];
        rem /= factor_sizes[i];
      }
    }
    return ProductStructure(std::move(factor_sizes), std::move(coords));
  }

  const std::vector<std::size_t>& factor_sizes() const { return sizes_; }
  std::size_t arity() const { return sizes_.size(); }
  std::size_t set_size() const { return point_of_.size(); }
  std::size_t coordinate(Point x, std::size_t i) const { return coords_[std::size_t(x) * sizes_.size() + i]; }
  Point point(std::span<const std::size_t> coords) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) idx = idx * sizes_[i] + coords[i];
    return point_of_[idx];
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> coords_;
  std::vector<Point> point_of_;
};

struct ProductAction {
  FiniteAction action;
  DirectProductDecomposition decomposition;
  ProductStructure structure;
};

/// (g1, g2).(x1, x2) = (g1.x1, g2.x2) on the lexicographic product set.
inline ProductAction product_action(const FiniteAction& a1, const FiniteAction& a2) {
  const auto& g1 = *a1.group();
  const auto& g2 = *a2.group();
  auto g = std::make_shared<const FiniteGroup>(direct_product(g1, g2));
  const std::size_t m1 = a1.set_size(), m2 = a2.set_size(), m = m1 * m2;
  std::vector<Point> table(g->order() * m);
  for (std::size_t e1 = 0; e1 < g1.order(); ++e1)
    for (std::size_t e2 = 0; e2 < g2.order(); ++e2) {
      const std::size_t e = e1 * g2.order() + e2;
      for (std::size_t x1 = 0; x1 < m1; ++x1)
        for (std::size_t x2 = 0; x2 < m2; ++x2)
          table[e * m + x1 * m2 + x2] =
              Point(a1.apply(Element(e1), Point(x1)) * m2 + a2.apply(Element(e2), Point(x2)));
    }
  return {FiniteAction::trusted(g, m, std::move(table)), direct_product_factors(g, g1, g2),
          ProductStructure::lexicographic({m1, m2})};
}

struct ActionViolation {
  Element g;
  Point x;
  std::size_t coordinate;  // the coordinate that moved although g lies in another factor
};

struct ActionVerdict {
  bool disentangled;
  std::optional<ActionViolation> witness;
};

/// True iff every element of factor i changes only coordinate i of every point.
inline ActionVerdict is_disentangled_action(const FiniteAction& a, const DirectProductDecomposition& d,
                                            const ProductStructure& p) {
  if (p.arity() != d.arity()) throw ArityMismatch(d.arity(), p.arity());
  if (!same_group(a.group(), d.parent())) throw GroupMismatch("decomposition is for a different group");
  if (p.set_size() != a.set_size()) throw SizeMismatch(a.set_size(), p.set_size());
  for (std::size_t i = 0; i < d.arity(); ++i)
    for (Element g : d.factors()[i].members())
      for (Point x = 0; x < a.set_size(); ++x) {
        const Point y = a.apply(g, x);
        for (std::size_t j = 0; j < p.arity(); ++j)
          if (j != i && p.coordinate(x, j) != p.coordinate(y, j)) return {false, ActionViolation{g, x, j}};
      }
  return {true, std::nullopt};
}

/// Orbits ordered by smallest member, each sorted.
inline std::vector<std::vector<Point>> orbits(const FiniteAction& a) {
  std::vector<char> seen(a.set_size(), 0);
  std::vector<std::vector<Point>> out;
  for (Point x = 0; x < a.set_size(); ++x) {
    if (seen[x]) continue;
    std::vector<Point> orb;
    for (Element g = 0; g < a.group()->order(); ++g) {
      Point y = a.apply(g, x);
      if (!seen[y]) {
        seen[y] = 1;
        orb.push_back(y);
      }
    }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

/// Orbits of the action restricted to a subgroup.
inline std::vector<std::vector<Point>> orbits(const FiniteAction& a, const Subgroup& h) {
  std::vector<char> seen(a.set_size(), 0);
  std::vector<std::vector<Point>> out;
  for (Point x = 0; x < a.set_size(); ++x) {
    if (seen[x]) continue;
    std::vector<Point> orb;
    for (Element g : h.members()) {
      Point y = a.apply(g, x);
      if (!seen[y]) {
        seen[y] = 1;
        orb.push_back(y);
      }
    }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

inline bool is_transitive(const FiniteAction& a) { return orbits(a).size() == 1; }

/// Only the identity fixes any point.
inline bool is_free(const FiniteAction& a) {
  for (Element g = 0; g < a.group()->order(); ++g) {
    if (g == a.group()->identity()) continue;
    for (Point x = 0; x < a.set_size(); ++x)
      if (a.apply(g, x) == x) return false;
  }
  return true;
}

/// Looks for a coder making `a` disentangled with respect to `d`. Coordinate
/// i of x is the index of x's orbit under the product of all other factors;
/// elements of those factors then fix coordinate i by construction, so the
/// only thing left to check is that the coordinate map is a bijection.
/// Complete for free and transitive actions.
inline std::optional<ProductStructure> search_product_structure(const FiniteAction& a,
                                                                const DirectProductDecomposition& d) {
  if (a.set_size() > kActionSearchGuard) throw SizeGuardExceeded(a.set_size(), kActionSearchGuard);
  if (!same_group(a.group(), d.parent())) throw GroupMismatch("decomposition is for a different group");
  const std::size_t k = d.arity(), m = a.set_size();
  std::vector<std::size_t> sizes(k);
  std::vector<std::size_t> coords(m * k);
  for (std::size_t i = 0; i < k; ++i) {
    auto orbs = orbits(a, d.complement(i));
    sizes[i] = orbs.size();
    for (std::size_t o = 0; o < orbs.size(); ++o)
      for (Point x : orbs[o]) coords[x * k + i] = o;
  }
  std::size_t total = 1;
  for (auto s : sizes) total *= s;
  if (total != m) return std::nullopt;
  try {
    ProductStructure p(std::move(sizes), std::move(coords));
    if (!is_disentangled_action(a, d, p).disentangled) return std::nullopt;
    return p;
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

}  // namespace symcert
