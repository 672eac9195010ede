#pragma once

// Finite groups stored extensionally as Cayley tables, together with
// subgroups, internal direct-product decompositions and the exhaustive
// searches over them.

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "symcert/errors.hpp"
#include "symcert/parallel.hpp"

namespace symcert {

using Element = std::uint32_t;

/// Exhaustive subgroup / decomposition searches refuse groups above this order.
inline constexpr std::size_t kSearchGuard = 256;

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

class FiniteGroup {
 public:
  /// Builds a group from a table known to satisfy the axioms. Only the
  /// library's own constructions use this; external tables go through
  /// validate_group().
  static FiniteGroup trusted(std::size_t order, std::vector<Element> cayley, Element identity,
                             std::vector<std::string> labels) {
    FiniteGroup g;
    g.order_ = order;
    g.cayley_ = std::move(cayley);
    g.identity_ = identity;
    g.labels_ = std::move(labels);
    if (g.labels_.size() != order) {
      g.labels_.resize(order);
      for (std::size_t i = 0; i < order; ++i) g.labels_[i] = std::to_string(i);
    }
    g.inverse_.assign(order, 0);
    for (Element a = 0; a < order; ++a)
      for (Element b = 0; b < order; ++b)
        if (g.mul(a, b) == identity) {
          g.inverse_[a] = b;
          break;
        }
    return g;
  }

  std::size_t order() const { return order_; }
  Element identity() const { return identity_; }
  Element mul(Element a, Element b) const { return cayley_[std::size_t(a) * order_ + b]; }
  Element inverse(Element a) const { return inverse_[a]; }
  const std::string& label(Element a) const { return labels_[a]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const Element> cayley() const { return cayley_; }

  /// Smallest k >= 1 with a^k = e.
  std::size_t element_order(Element a) const {
    std::size_t k = 1;
    for (Element p = a; p != identity_; p = mul(p, a)) ++k;
    return k;
  }

  /// g^k by repeated multiplication.
  Element power(Element a, std::size_t k) const {
    Element p = identity_;
    for (std::size_t i = 0; i < k; ++i) p = mul(p, a);
    return p;
  }

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) {
    return a.order_ == b.order_ && a.cayley_ == b.cayley_;
  }

 private:
  FiniteGroup() = default;

  std::size_t order_ = 0;
  std::vector<Element> cayley_;
  Element identity_ = 0;
  std::vector<std::string> labels_;
  std::vector<Element> inverse_;
};

inline bool same_group(const GroupPtr& a, const GroupPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Checks the three group axioms on a row-major n*n table and returns the
/// group. The identity is discovered from the table.
inline FiniteGroup validate_group(std::span<const Element> table, std::vector<std::string> labels) {
  const std::size_t n = static_cast<std::size_t>(std::llround(std::sqrt(double(table.size()))));
  if (n == 0 || n * n != table.size())
    throw InvalidArgument("Cayley table must be a non-empty square");
  if (!labels.empty() && labels.size() != n)
    throw InvalidArgument("label count does not match group order");
  for (Element v : table)
    if (v >= n) throw InvalidArgument("Cayley table entry out of range: " + std::to_string(v));

  auto at = [&](std::size_t a, std::size_t b) { return table[a * n + b]; };

  std::optional<Element> identity;
  for (std::size_t e = 0; e < n && !identity; ++e) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) ok = at(e, x) == x && at(x, e) == x;
    if (ok) identity = static_cast<Element>(e);
  }

  // Latin-square check first: it pins down a witness line even when there
  // is no identity at all.
  std::vector<char> seen(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t c = 0; c < n; ++c) {
      if (seen[at(r, c)]) throw NotInvertible(NotInvertible::Line::Row, r);
      seen[at(r, c)] = 1;
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      if (seen[at(r, c)]) throw NotInvertible(NotInvertible::Line::Column, c);
      seen[at(r, c)] = 1;
    }
  }
  if (!identity) throw NoIdentity();

  // First violating triple in lexicographic order, computed per row.
  std::vector<std::array<std::size_t, 2>> first_bad(n, {n, n});
  parallel_for(n, [&](std::size_t x) {
    for (std::size_t y = 0; y < n; ++y) {
      const std::size_t xy = at(x, y);
      for (std::size_t z = 0; z < n; ++z)
        if (at(xy, z) != at(x, at(y, z))) {
          first_bad[x] = {y, z};
          return;
        }
    }
  });
  for (std::size_t x = 0; x < n; ++x)
    if (first_bad[x][0] != n) throw NotAssociative(x, first_bad[x][0], first_bad[x][1]);

  return FiniteGroup::trusted(n, std::vector<Element>(table.begin(), table.end()), *identity,
                              std::move(labels));
}

inline FiniteGroup cyclic_group(std::size_t n) {
  if (n == 0) throw InvalidArgument("cyclic group order must be positive");
  std::vector<Element> t(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = std::to_string(i);
    for (std::size_t j = 0; j < n; ++j) t[i * n + j] = static_cast<Element>((i + j) % n);
  }
  return FiniteGroup::trusted(n, std::move(t), 0, std::move(labels));
}

/// External direct product on pairs; (a, b) has index a*|H| + b.
inline FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h) {
  const std::size_t ng = g.order(), nh = h.order(), n = ng * nh;
  std::vector<Element> t(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < ng; ++a)
    for (std::size_t b = 0; b < nh; ++b) {
      const std::size_t p = a * nh + b;
      labels[p] = "(" + g.label(Element(a)) + "," + h.label(Element(b)) + ")";
      for (std::size_t c = 0; c < ng; ++c)
        for (std::size_t d = 0; d < nh; ++d)
          t[p * n + c * nh + d] =
              static_cast<Element>(g.mul(Element(a), Element(c)) * nh + h.mul(Element(b), Element(d)));
    }
  return FiniteGroup::trusted(n, std::move(t), static_cast<Element>(g.identity() * nh + h.identity()),
                              std::move(labels));
}

inline bool is_abelian(const FiniteGroup& g) {
  for (Element x = 0; x < g.order(); ++x)
    for (Element y = x + 1; y < g.order(); ++y)
      if (g.mul(x, y) != g.mul(y, x)) return false;
  return true;
}

/// Conjugacy classes ordered by smallest member.
inline std::vector<std::vector<Element>> conjugacy_classes(const FiniteGroup& g) {
  std::vector<int> cls(g.order(), -1);
  std::vector<std::vector<Element>> out;
  for (Element x = 0; x < g.order(); ++x) {
    if (cls[x] >= 0) continue;
    std::vector<Element> members;
    for (Element k = 0; k < g.order(); ++k) {
      Element c = g.mul(g.mul(k, x), g.inverse(k));
      if (cls[c] < 0) {
        cls[c] = int(out.size());
        members.push_back(c);
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

/// Subgroup generated by `gens` as a sorted member list.
inline std::vector<Element> generated_members(const FiniteGroup& g, std::span<const Element> gens) {
  std::vector<char> in(g.order(), 0);
  std::vector<Element> members{g.identity()};
  in[g.identity()] = 1;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (Element s : gens) {
      Element m = g.mul(members[i], s);
      if (!in[m]) {
        in[m] = 1;
        members.push_back(m);
      }
    }
  std::sort(members.begin(), members.end());
  return members;
}

class Subgroup {
 public:
  /// Validates closure under the product and inverses.
  Subgroup(GroupPtr parent, std::vector<Element> members) : parent_(std::move(parent)) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    const auto& g = *parent_;
    std::vector<char> in(g.order(), 0);
    for (Element m : members) {
      if (m >= g.order()) throw NotASubgroup("member out of range");
      in[m] = 1;
    }
    if (members.empty() || !in[g.identity()]) throw NotASubgroup("missing identity");
    for (Element a : members) {
      if (!in[g.inverse(a)]) throw NotASubgroup("not closed under inverses at " + g.label(a));
      for (Element b : members)
        if (!in[g.mul(a, b)])
          throw NotASubgroup("not closed under the product at (" + g.label(a) + ", " + g.label(b) + ")");
    }
    members_ = std::move(members);
  }

  static Subgroup generated(GroupPtr parent, std::span<const Element> gens) {
    auto m = generated_members(*parent, gens);
    return Subgroup(std::move(parent), std::move(m), Trusted{});
  }
  static Subgroup whole(GroupPtr parent) {
    std::vector<Element> m(parent->order());
    std::iota(m.begin(), m.end(), 0);
    return Subgroup(std::move(parent), std::move(m), Trusted{});
  }
  static Subgroup trivial(GroupPtr parent) {
    std::vector<Element> m{parent->identity()};
    return Subgroup(std::move(parent), std::move(m), Trusted{});
  }

  const GroupPtr& parent() const { return parent_; }
  const std::vector<Element>& members() const { return members_; }
  std::size_t order() const { return members_.size(); }
  bool contains(Element e) const { return std::binary_search(members_.begin(), members_.end(), e); }

  bool is_normal() const {
    const auto& g = *parent_;
    for (Element k = 0; k < g.order(); ++k)
      for (Element h : members_)
        if (!contains(g.mul(g.mul(k, h), g.inverse(k)))) return false;
    return true;
  }

  /// Greedy generating set: repeatedly adds the member of largest order not
  /// yet generated.
  std::vector<Element> generators() const {
    const auto& g = *parent_;
    std::vector<Element> gens;
    std::vector<Element> current{g.identity()};
    while (current.size() < members_.size()) {
      Element best = g.identity();
      std::size_t best_order = 0;
      for (Element m : members_) {
        if (std::binary_search(current.begin(), current.end(), m)) continue;
        std::size_t o = g.element_order(m);
        if (o > best_order) {
          best_order = o;
          best = m;
        }
      }
      gens.push_back(best);
      current = generated_members(g, gens);
    }
    return gens;
  }

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.members_ == b.members_ && same_group(a.parent_, b.parent_);
  }
  /// Orders by size, then lexicographically by members.
  friend bool operator<(const Subgroup& a, const Subgroup& b) {
    if (a.members_.size() != b.members_.size()) return a.members_.size() < b.members_.size();
    return a.members_ < b.members_;
  }

 private:
  struct Trusted {};
  Subgroup(GroupPtr parent, std::vector<Element> members, Trusted)
      : parent_(std::move(parent)), members_(std::move(members)) {}

  GroupPtr parent_;
  std::vector<Element> members_;
};

/// A subgroup viewed as a group in its own right. Element i of the result is
/// `embedding[i]` in the parent.
struct SubgroupAsGroup {
  FiniteGroup group;
  std::vector<Element> embedding;
};

inline SubgroupAsGroup as_group(const Subgroup& h) {
  const auto& g = *h.parent();
  const auto& m = h.members();
  std::vector<Element> local(g.order(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) local[m[i]] = Element(i);
  std::vector<Element> t(m.size() * m.size());
  std::vector<std::string> labels(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    labels[i] = g.label(m[i]);
    for (std::size_t j = 0; j < m.size(); ++j) t[i * m.size() + j] = local[g.mul(m[i], m[j])];
  }
  return {FiniteGroup::trusted(m.size(), std::move(t), local[g.identity()], std::move(labels)), m};
}

/// Internal direct product G = G_1 x ... x G_k. Tuples are indexed in mixed
/// radix with the first factor most significant; tuple (g_1, ..., g_k) maps
/// to g_1 * g_2 * ... * g_k.
class DirectProductDecomposition {
 public:
  DirectProductDecomposition(GroupPtr parent, std::vector<Subgroup> factors)
      : parent_(std::move(parent)), factors_(std::move(factors)) {
    const auto& g = *parent_;
    if (factors_.empty()) throw InvalidDecomposition("decomposition needs at least one factor");
    for (const auto& f : factors_)
      if (!same_group(f.parent(), parent_))
        throw InvalidDecomposition("factor belongs to a different group");

    for (std::size_t i = 0; i < factors_.size(); ++i)
      for (std::size_t j = i + 1; j < factors_.size(); ++j) {
        for (Element a : factors_[i].members()) {
          if (a != g.identity() && factors_[j].contains(a))
            throw InvalidDecomposition("factors " + std::to_string(i) + " and " + std::to_string(j) +
                                       " intersect nontrivially at " + g.label(a));
          for (Element b : factors_[j].members())
            if (g.mul(a, b) != g.mul(b, a))
              throw InvalidDecomposition("factors " + std::to_string(i) + " and " +
                                         std::to_string(j) + " do not commute at (" + g.label(a) +
                                         ", " + g.label(b) + ")");
        }
      }

    std::size_t total = 1;
    for (const auto& f : factors_) total *= f.order();
    if (total != g.order())
      throw InvalidDecomposition("factor orders multiply to " + std::to_string(total) +
                                 ", group order is " + std::to_string(g.order()));

    factor_map_.assign(total, 0);
    components_.assign(g.order() * factors_.size(), 0);
    std::vector<char> hit(g.order(), 0);
    std::vector<std::size_t> digits(factors_.size(), 0);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rem = t;
      for (std::size_t i = factors_.size(); i-- > 0;) {
        digits[i] = rem % factors_[i].order();
        rem /= factors_[i].order();
      }
      Element p = g.identity();
      for (std::size_t i = 0; i < factors_.size(); ++i) p = g.mul(p, factors_[i].members()[digits[i]]);
      if (hit[p]) throw InvalidDecomposition("factor map is not injective at " + g.label(p));
      hit[p] = 1;
      factor_map_[t] = p;
      for (std::size_t i = 0; i < factors_.size(); ++i) components_[p * factors_.size() + i] = digits[i];
    }
  }

  const GroupPtr& parent() const { return parent_; }
  const std::vector<Subgroup>& factors() const { return factors_; }
  std::size_t arity() const { return factors_.size(); }

  /// Parent element for a tuple given as positions within each factor's member list.
  Element compose(std::span<const std::size_t> positions) const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) t = t * factors_[i].order() + positions[i];
    return factor_map_[t];
  }
  /// Position of g's i-th component within factor i's member list.
  std::size_t component(Element g, std::size_t i) const { return components_[g * factors_.size() + i]; }
  /// g's i-th component as a parent element.
  Element component_element(Element g, std::size_t i) const {
    return factors_[i].members()[component(g, i)];
  }

  /// The subgroup generated by every factor except `i`.
  Subgroup complement(std::size_t i) const {
    std::vector<Element> gens;
    for (std::size_t j = 0; j < factors_.size(); ++j)
      if (j != i)
        for (Element s : factors_[j].generators()) gens.push_back(s);
    return Subgroup::generated(parent_, gens);
  }

  std::vector<std::size_t> factor_orders() const {
    std::vector<std::size_t> o;
    for (const auto& f : factors_) o.push_back(f.order());
    return o;
  }

 private:
  GroupPtr parent_;
  std::vector<Subgroup> factors_;
  std::vector<Element> factor_map_;
  std::vector<std::size_t> components_;
};

/// The embedded copies G x {e} and {e} x H inside direct_product(G, H).
inline DirectProductDecomposition direct_product_factors(const GroupPtr& product,
                                                         const FiniteGroup& left,
                                                         const FiniteGroup& right) {
  if (product->order() != left.order() * right.order())
    throw InvalidArgument("product order does not match the factor orders");
  std::vector<Element> l, r;
  for (std::size_t a = 0; a < left.order(); ++a) l.push_back(Element(a * right.order() + right.identity()));
  for (std::size_t b = 0; b < right.order(); ++b) r.push_back(Element(left.identity() * right.order() + b));
  return DirectProductDecomposition(product, {Subgroup(product, l), Subgroup(product, r)});
}

namespace detail {

using Bits = std::bitset<kSearchGuard>;

inline Bits to_bits(std::span<const Element> members) {
  Bits b;
  for (Element m : members) b.set(m);
  return b;
}

inline std::vector<Element> from_bits(const Bits& b, std::size_t n) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < n; ++i)
    if (b.test(i)) out.push_back(Element(i));
  return out;
}

}  // namespace detail

/// Every subgroup of `g`, sorted by order then members. Enumerated by
/// cyclic extension: each subgroup is some <H, x> with H a smaller subgroup.
inline std::vector<Subgroup> all_subgroups(const GroupPtr& g) {
  const std::size_t n = g->order();
  if (n > kSearchGuard) throw SizeGuardExceeded(n, kSearchGuard);

  struct Node {
    detail::Bits bits;
    std::vector<Element> gens;
  };
  std::unordered_set<detail::Bits> seen;
  std::vector<Node> found;
  Node root{detail::Bits{}, {}};
  root.bits.set(g->identity());
  seen.insert(root.bits);
  found.push_back(root);

  for (std::size_t i = 0; i < found.size(); ++i) {
    const detail::Bits h = found[i].bits;
    const auto hm = detail::from_bits(h, n);
    detail::Bits done = h;
    for (Element x = 0; x < n; ++x) {
      if (done.test(x)) continue;
      // <H, x> = <H, hx> for every h in H, so the whole coset is covered.
      for (Element m : hm) done.set(g->mul(m, x));
      auto gens = found[i].gens;
      gens.push_back(x);
      auto members = generated_members(*g, gens);
      auto bits = detail::to_bits(members);
      if (seen.insert(bits).second) found.push_back({bits, std::move(gens)});
    }
  }

  std::vector<Subgroup> out;
  out.reserve(found.size());
  for (const auto& node : found) out.push_back(Subgroup::generated(g, node.gens));
  std::sort(out.begin(), out.end());
  return out;
}

/// All internal direct-product decompositions of `g` into 2..max_factors
/// nontrivial factors, each listed once regardless of factor order. An empty
/// result means `g` is directly indecomposable.
inline std::vector<DirectProductDecomposition> find_direct_decompositions(const GroupPtr& g,
                                                                          std::size_t max_factors) {
  const std::size_t n = g->order();
  if (n > kSearchGuard) throw SizeGuardExceeded(n, kSearchGuard);
  std::vector<DirectProductDecomposition> out;
  if (max_factors < 2 || n < 4) return out;

  // Factors of an internal direct product are normal, nontrivial and proper.
  std::vector<Subgroup> cand;
  for (auto& s : all_subgroups(g))
    if (s.order() > 1 && s.order() < n && s.is_normal()) cand.push_back(std::move(s));

  const std::size_t c = cand.size();
  std::vector<detail::Bits> bits(c);
  for (std::size_t i = 0; i < c; ++i) bits[i] = detail::to_bits(cand[i].members());

  // Pairwise elementwise commutation, computed lazily.
  std::vector<signed char> commute(c * c, -1);
  auto commutes = [&](std::size_t a, std::size_t b) {
    auto& slot = commute[a * c + b];
    if (slot < 0) {
      slot = 1;
      for (Element x : cand[a].members()) {
        for (Element y : cand[b].members())
          if (g->mul(x, y) != g->mul(y, x)) {
            slot = 0;
            break;
          }
        if (!slot) break;
      }
      commute[b * c + a] = slot;
    }
    return slot == 1;
  };

  std::vector<std::size_t> chosen;
  auto recurse = [&](auto&& self, std::size_t start, const detail::Bits& product,
                     std::size_t product_order) -> void {
    if (product_order == n) {
      if (chosen.size() >= 2) {
        std::vector<Subgroup> factors;
        for (std::size_t k : chosen) factors.push_back(cand[k]);
        out.emplace_back(g, std::move(factors));
      }
      return;
    }
    if (chosen.size() == max_factors) return;
    for (std::size_t k = start; k < c; ++k) {
      const std::size_t ord = cand[k].order();
      if (n % (product_order * ord) != 0) continue;
      if ((bits[k] & product).count() != 1) continue;
      bool ok = true;
      for (std::size_t j : chosen)
        if (!commutes(j, k)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      detail::Bits next;
      for (Element p : detail::from_bits(product, n))
        for (Element h : cand[k].members()) next.set(g->mul(p, h));
      chosen.push_back(k);
      self(self, k + 1, next, product_order * ord);
      chosen.pop_back();
    }
  };
  detail::Bits trivial;
  trivial.set(g->identity());
  recurse(recurse, 0, trivial, 1);
  return out;
}

/// Rotation group of the cube (order 24), generated by quarter turns about
/// the z and x axes acting on the eight vertices. Composition is
/// (p * q)(v) = p(q(v)); element 0 is the identity.
inline FiniteGroup cube_rotation_group() {
  using Perm = std::array<std::uint8_t, 8>;
  // Vertex v <-> (x, y, z) with coordinate bit set meaning +1.
  auto vertex = [](int x, int y, int z) {
    return std::uint8_t((x > 0 ? 4 : 0) | (y > 0 ? 2 : 0) | (z > 0 ? 1 : 0));
  };
  auto coords = [](std::uint8_t v) {
    return std::array<int, 3>{(v & 4) ? 1 : -1, (v & 2) ? 1 : -1, (v & 1) ? 1 : -1};
  };
  Perm rz{}, rx{}, id{};
  for (std::uint8_t v = 0; v < 8; ++v) {
    auto [x, y, z] = coords(v);
    rz[v] = vertex(-y, x, z);
    rx[v] = vertex(x, -z, y);
    id[v] = v;
  }
  auto compose = [](const Perm& p, const Perm& q) {
    Perm r{};
    for (std::size_t v = 0; v < 8; ++v) r[v] = p[q[v]];
    return r;
  };

  std::vector<Perm> elems{id};
  std::map<Perm, Element> index{{id, 0}};
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (const Perm& s : {rz, rx}) {
      Perm p = compose(elems[i], s);
      if (index.emplace(p, Element(elems.size())).second) elems.push_back(p);
    }

  const std::size_t n = elems.size();
  std::vector<Element> t(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string l = "[";
    for (std::size_t v = 0; v < 8; ++v) l += char('0' + elems[i][v]);
    labels[i] = l + "]";
    for (std::size_t j = 0; j < n; ++j) t[i * n + j] = index.at(compose(elems[i], elems[j]));
  }
  return FiniteGroup::trusted(n, std::move(t), 0, std::move(labels));
}

/// Position of the quarter-turn generators inside cube_rotation_group().
inline std::array<Element, 2> cube_quarter_turns() { return {1, 2}; }

}  // namespace symcert
