#pragma once

// The N x N wrap-around grid world with N colours: its symmetry group
// C_N x C_N x C_N, pixel rendering, and two analytic embeddings.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "symcert/action.hpp"
#include "symcert/group.hpp"
#include "symcert/representation.hpp"
#include "symcert/table.hpp"

namespace symcert {

struct GridWorldSpec {
  std::size_t n = 4;
  std::size_t cell_pixels = 8;
  std::vector<std::uint8_t> palette;  // palette[c] = round(255 (c + 1) / N)

  std::size_t num_states() const { return n * n * n; }
  std::size_t image_side() const { return n * cell_pixels; }
};

inline GridWorldSpec make_grid_spec(std::size_t n, std::size_t cell_pixels = 8) {
  if (n < 2) throw InvalidArgument("grid world needs N >= 2");
  if (cell_pixels == 0) throw InvalidArgument("cell_pixels must be positive");
  // palette must be strictly increasing and fit in a byte
  if (n > 255) throw InvalidArgument("grid world palette supports N <= 255");
  GridWorldSpec s{n, cell_pixels, {}};
  for (std::size_t c = 0; c < n; ++c)
    s.palette.push_back(std::uint8_t(std::lround(255.0 * double(c + 1) / double(n))));
  return s;
}

struct WorldState {
  std::size_t x = 0, y = 0, c = 0;
  friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Lexicographic (x, y, c) <-> x N^2 + y N + c.
inline std::size_t state_index(std::size_t n, const WorldState& w) { return (w.x * n + w.y) * n + w.c; }
inline WorldState state_at(std::size_t n, std::size_t index) {
  return {index / (n * n), (index / n) % n, index % n};
}

/// Offsets (dx, dy, dc) of a group element; element index is laid out like
/// state indices.
using WorldOffsets = WorldState;

struct WorldGroup {
  std::size_t n;
  GroupPtr group;
  DirectProductDecomposition decomposition;  // G_x x G_y x G_c
  FiniteAction action;                       // wrap-around action on state indices
  std::array<Element, 3> generators;         // g_x, g_y, g_c

  WorldOffsets offsets(Element g) const { return state_at(n, g); }
  Element element(const WorldOffsets& o) const { return Element(state_index(n, o)); }
};

inline WorldState apply_world_action(std::size_t n, const WorldOffsets& g, const WorldState& w) {
  return {(w.x + g.x) % n, (w.y + g.y) % n, (w.c + g.c) % n};
}

inline WorldState apply_world_action(const GridWorldSpec& spec, const WorldOffsets& g, const WorldState& w) {
  return apply_world_action(spec.n, g, w);
}

inline WorldGroup world_group(std::size_t n) {
  if (n < 2) throw InvalidArgument("grid world needs N >= 2");
  const std::size_t m = n * n * n;
  std::vector<Element> cayley(m * m);
  std::vector<Point> table(m * m);
  std::vector<std::string> labels(m);
  for (std::size_t a = 0; a < m; ++a) {
    const auto ga = state_at(n, a);
    labels[a] = "(" + std::to_string(ga.x) + "," + std::to_string(ga.y) + "," + std::to_string(ga.c) + ")";
    for (std::size_t b = 0; b < m; ++b) {
      const auto v = state_index(n, apply_world_action(n, ga, state_at(n, b)));
      cayley[a * m + b] = Element(v);
      table[a * m + b] = Point(v);
    }
  }
  auto g = std::make_shared<const FiniteGroup>(FiniteGroup::trusted(m, std::move(cayley), 0, std::move(labels)));
  std::vector<Element> gx, gy, gc;
  for (std::size_t k = 0; k < n; ++k) {
    gx.push_back(Element(state_index(n, {k, 0, 0})));
    gy.push_back(Element(state_index(n, {0, k, 0})));
    gc.push_back(Element(state_index(n, {0, 0, k})));
  }
  DirectProductDecomposition d(g, {Subgroup(g, gx), Subgroup(g, gy), Subgroup(g, gc)});
  return {n,
          g,
          std::move(d),
          FiniteAction::trusted(g, m, std::move(table)),
          {Element(state_index(n, {1, 0, 0})), Element(state_index(n, {0, 1, 0})),
           Element(state_index(n, {0, 0, 1}))}};
}

/// The coarser split G = G_p x G_c with G_p all position changes.
inline DirectProductDecomposition position_colour_decomposition(const WorldGroup& wg) {
  const std::size_t n = wg.n;
  std::vector<Element> gp, gc;
  for (std::size_t a = 0; a < n; ++a) {
    gc.push_back(Element(state_index(n, {0, 0, a})));
    for (std::size_t b = 0; b < n; ++b) gp.push_back(Element(state_index(n, {a, b, 0})));
  }
  return DirectProductDecomposition(wg.group, {Subgroup(wg.group, gp), Subgroup(wg.group, gc)});
}

struct Observation {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top-left origin

  std::uint8_t at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Black background with the cell at column x, row y filled with palette[c].
inline Observation render(const GridWorldSpec& spec, const WorldState& w) {
  if (w.x >= spec.n || w.y >= spec.n || w.c >= spec.n) throw InvalidArgument("world state out of range");
  const std::size_t side = spec.image_side(), cp = spec.cell_pixels;
  Observation o{side, side, std::vector<std::uint8_t>(side * side, 0)};
  for (std::size_t r = w.y * cp; r < (w.y + 1) * cp; ++r)
    for (std::size_t c = w.x * cp; c < (w.x + 1) * cp; ++c) o.pixels[r * side + c] = spec.palette[w.c];
  return o;
}

/// Binary PGM (P5, maxval 255).
inline std::string to_pgm(const Observation& o) {
  std::string out = "P5\n" + std::to_string(o.width) + " " + std::to_string(o.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(o.pixels.data()), o.pixels.size());
  return out;
}

/// f(x, y, c) = (e^{2 pi i x/N}, e^{2 pi i y/N}, e^{2 pi i c/N}).
inline Eigen::Vector3cd canonical_embedding(std::size_t n, const WorldState& w) {
  auto phase = [n](std::size_t k) { return std::polar(1.0, 2.0 * std::numbers::pi * double(k) / double(n)); };
  return {phase(w.x), phase(w.y), phase(w.c)};
}

/// Real form of canonical_embedding: (Re, Im) interleaved per coordinate.
inline Eigen::VectorXd canonical_embedding_real(std::size_t n, const WorldState& w) {
  const auto z = canonical_embedding(n, w);
  Eigen::VectorXd v(6);
  for (int i = 0; i < 3; ++i) {
    v(2 * i) = z(i).real();
    v(2 * i + 1) = z(i).imag();
  }
  return v;
}

inline Eigen::Matrix2d rotation2(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Block-diagonal of three 2x2 rotations by 2 pi dx/N, 2 pi dy/N, 2 pi dc/N.
inline RMatrix canonical_linear_action(std::size_t n, const WorldOffsets& g) {
  RMatrix m = RMatrix::Zero(6, 6);
  const double step = 2.0 * std::numbers::pi / double(n);
  m.block<2, 2>(0, 0) = rotation2(step * double(g.x));
  m.block<2, 2>(2, 2) = rotation2(step * double(g.y));
  m.block<2, 2>(4, 4) = rotation2(step * double(g.c));
  return m;
}

/// The canonical 6-dim real representation of the world group.
inline LinearRepresentation canonical_representation(const WorldGroup& wg, double tol_rep = kDefaultTolRep) {
  std::vector<RMatrix> m;
  m.reserve(wg.group->order());
  for (Element g = 0; g < wg.group->order(); ++g) m.push_back(canonical_linear_action(wg.n, wg.offsets(g)));
  return validate_representation(wg.group, m, tol_rep);
}

/// (l_x x, l_y y, l_c c): disentangled, but the induced wrap-around action is
/// not linear.
inline Eigen::Vector3d coordinate_embedding(const WorldState& w, const Eigen::Vector3d& scales) {
  if ((scales.array() == 0.0).any()) throw ZeroScale();
  return {scales(0) * double(w.x), scales(1) * double(w.y), scales(2) * double(w.c)};
}

inline RepresentationTable canonical_table(std::size_t n) {
  Eigen::MatrixXd rows(n * n * n, 6);
  for (std::size_t s = 0; s < n * n * n; ++s) rows.row(Eigen::Index(s)) = canonical_embedding_real(n, state_at(n, s));
  return RepresentationTable(std::move(rows));
}

inline RepresentationTable coordinate_table(std::size_t n, const Eigen::Vector3d& scales = Eigen::Vector3d::Ones()) {
  Eigen::MatrixXd rows(n * n * n, 3);
  for (std::size_t s = 0; s < n * n * n; ++s) rows.row(Eigen::Index(s)) = coordinate_embedding(state_at(n, s), scales);
  return RepresentationTable(std::move(rows));
}

enum class PhaseMixing { XC, XY };

/// Canonical table with two phase axes rotated by 45 degrees in the
/// character lattice: XC uses phases (x + c, y, x - c), XY uses
/// (x + y, x - y, c). Every mixed plane transforms under both of the mixed
/// factors at once.
inline RepresentationTable phase_mixed_table(std::size_t n, PhaseMixing mixing) {
  Eigen::MatrixXd rows(n * n * n, 6);
  const double step = 2.0 * std::numbers::pi / double(n);
  for (std::size_t s = 0; s < n * n * n; ++s) {
    const auto w = state_at(n, s);
    const double x = double(w.x), y = double(w.y), c = double(w.c);
    std::array<double, 3> phases = mixing == PhaseMixing::XC ? std::array<double, 3>{x + c, y, x - c}
                                                             : std::array<double, 3>{x + y, x - y, c};
    for (int i = 0; i < 3; ++i) {
      rows(Eigen::Index(s), 2 * i) = std::cos(step * phases[i]);
      rows(Eigen::Index(s), 2 * i + 1) = std::sin(step * phases[i]);
    }
  }
  return RepresentationTable(std::move(rows));
}

}  // namespace symcert
