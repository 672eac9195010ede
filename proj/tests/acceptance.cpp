// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Tolerances and time limits are fixed below.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "generators.hpp"
#include "process.hpp"
#include "symcert/symcert.hpp"

using namespace symcert;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr double kLinearResidual = 1e-9;
constexpr double kLinearSeconds = 5.0;
// Criterion 2
constexpr double kNonlinearRelative = 0.1;
constexpr double kNonlinearSeconds = 5.0;
// Criterion 3
constexpr double kSearchSeconds = 60.0;
// Criterion 4
constexpr double kRelativitySeconds = 5.0;
// Criterion 5
constexpr std::size_t kRepCases = 240;
constexpr double kCharacterTol = 1e-9;
constexpr double kProjectorTol = 1e-7;
constexpr double kFactorizationTol = 1e-8;
// Criterion 6
constexpr std::size_t kInvarianceTrials = 120;
// Criterion 7
constexpr std::size_t kFaultsPerTable = 40;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

fs::path work_dir() {
  auto p = fs::temp_directory_path() / "symcert_acceptance";
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(3);
  o << v;
  return o.str();
}

GroupPtr share(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

// ------------------------------------------------------------------ 1

Outcome linear_worked_example(const fs::path& dir) {
  Outcome o;
  double slowest = 0.0, worst_eq = 0.0, worst_hom = 0.0;
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto out = dir / ("linear_" + std::to_string(n));
    const auto t0 = Clock::now();
    auto r = proc::run_cli("demo linear-grid --n " + std::to_string(n) + " --out " + proc::quote(out.string()));
    const double t = seconds_since(t0);
    slowest = std::max(slowest, t);
    const std::string tag = "N=" + std::to_string(n) + ": ";
    if (r.status != 0) {
      o.require(false, tag + "exit " + std::to_string(r.status));
      continue;
    }
    const auto rep = io::read_json(out / "report.json");
    const double eq = rep["linear_fit"]["equivariance_residual"].get<double>();
    const double hom = rep["linear_fit"]["homomorphism_residual"].get<double>();
    const auto dims = rep["decomposition_found"]["block_dims"].get<std::vector<std::size_t>>();
    worst_eq = std::max(worst_eq, eq);
    worst_hom = std::max(worst_hom, hom);
    o.require(rep["verdict_linear_disentangled"].get<bool>(), tag + "not linearly disentangled");
    o.require(eq <= kLinearResidual, tag + "equivariance residual " + fmt(eq));
    o.require(hom <= kLinearResidual, tag + "homomorphism residual " + fmt(hom));
    o.require(dims == std::vector<std::size_t>{2, 2, 2}, tag + "blocks " + join(dims));
    o.require(t < kLinearSeconds, tag + "took " + fmt(t) + " s");

    // The least-squares route must agree wherever the data has full rank.
    if (n >= 3) {
      auto wg = world_group(n);
      auto fitted = certify(canonical_table(n), wg.action, wg.decomposition);
      o.require(fitted.verdict_linear_disentangled && fitted.block_dims() == std::vector<std::size_t>{2, 2, 2},
                tag + "fitted action disagrees");
    }
  }
  if (o.pass)
    o.detail = "N=2..8: three 2-dim blocks; max equivariance " + fmt(worst_eq) + ", homomorphism " + fmt(worst_hom) +
               "; slowest " + fmt(slowest) + " s";
  return o;
}

// ------------------------------------------------------------------ 2

Outcome nonlinear_worked_example(const fs::path& dir) {
  Outcome o;
  const auto out = dir / "grid";
  const auto t0 = Clock::now();
  auto r = proc::run_cli("demo grid --out " + proc::quote(out.string()));
  const double t = seconds_since(t0);
  if (r.status != 0) {
    o.require(false, "exit " + std::to_string(r.status) + ": " + r.output);
    return o;
  }
  const auto rep = io::read_json(out / "report.json");
  const double rel = rep["linear_fit"]["relative_equivariance_residual"].get<double>();
  o.require(rep["verdict_disentangled"].get<bool>(), "not disentangled");
  o.require(!rep["verdict_linear_disentangled"].get<bool>(), "linearly disentangled");
  o.require(rel > kNonlinearRelative, "relative linear-fit residual only " + fmt(rel));
  o.require(t < kNonlinearSeconds, "took " + fmt(t) + " s");
  if (o.pass)
    o.detail = "disentangled, not linear; relative linear-fit residual " + fmt(rel) + "; " + fmt(t) + " s";
  return o;
}

// ------------------------------------------------------------------ 3

Outcome non_decomposability() {
  Outcome o;
  const auto t0 = Clock::now();
  auto orders = [](const DirectProductDecomposition& d) {
    auto v = d.factor_orders();
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto cube = find_direct_decompositions(share(cube_rotation_group()), 4);
  const auto c6 = find_direct_decompositions(share(cyclic_group(6)), 4);
  const auto c12 = find_direct_decompositions(share(cyclic_group(12)), 4);
  const double t = seconds_since(t0);
  o.require(cube.empty(), "cube group: " + std::to_string(cube.size()) + " decompositions");
  o.require(c6.size() == 1 && orders(c6[0]) == std::vector<std::size_t>{2, 3}, "C6 search wrong");
  o.require(c12.size() == 1 && orders(c12[0]) == std::vector<std::size_t>{3, 4}, "C12 search wrong");
  o.require(t < kSearchSeconds, "took " + fmt(t) + " s");
  if (o.pass) o.detail = "cube: 0; C6: {2,3}; C12: {3,4}; " + fmt(t) + " s";
  return o;
}

// ------------------------------------------------------------------ 4

Outcome decomposition_relativity(const fs::path& dir) {
  Outcome o;
  const auto out = dir / "mixed";
  auto gen = proc::run_cli("demo linear-grid --variant mixed-xy --out " + proc::quote(out.string()));
  if (gen.status != 0) {
    o.require(false, "demo exit " + std::to_string(gen.status));
    return o;
  }
  auto run = [&](const std::string& dec, double& t) {
    const auto t0 = Clock::now();
    auto r = proc::run_cli("certify --world " + proc::quote(out.string()) + " --rep " +
                           proc::quote((out / "table.csv").string()) + " --decomposition " +
                           proc::quote((out / dec).string()) + " --report " +
                           proc::quote((out / (dec + ".report")).string()));
    t = seconds_since(t0);
    return r.status;
  };
  double t_fine = 0, t_coarse = 0;
  const int fine = run("decomposition.json", t_fine);
  const int coarse = run("decomposition_position_colour.json", t_coarse);
  o.require(fine == 3, "G_x x G_y x G_c exit " + std::to_string(fine));
  o.require(coarse == 0, "G_p x G_c exit " + std::to_string(coarse));
  o.require(t_fine < kRelativitySeconds && t_coarse < kRelativitySeconds,
            "took " + fmt(t_fine) + " s / " + fmt(t_coarse) + " s");
  if (o.pass)
    o.detail = "N=8 x/y-mixed table: exit 3 under G_x x G_y x G_c (" + fmt(t_fine) + " s), exit 0 under G_p x G_c (" +
               fmt(t_coarse) + " s)";
  return o;
}

// ------------------------------------------------------------------ 5

Outcome representation_properties() {
  Outcome o;
  std::mt19937 rng(20260501);
  std::size_t cases = 0;
  double worst_char = 0, worst_proj = 0, worst_fact = 0;
  for (std::size_t trial = 0; trial < kRepCases; ++trial) {
    auto p = gen::random_cyclic_pair(rng, 8);
    const std::size_t d1 = 1 + rng() % 6, d2 = 1 + rng() % (12 / d1);
    auto r1 = gen::random_representation(rng, p, d1);
    auto r2 = gen::random_representation(rng, p, d2);
    const std::string tag = "case " + std::to_string(trial) + ": ";
    try {
      auto s = validate_representation(p.group, direct_sum(r1.rep, r2.rep).matrices(), Field::Complex);
      auto t = validate_representation(p.group, tensor_product(r1.rep, r2.rep).matrices(), Field::Complex);
      const auto c1 = character(r1.rep), c2 = character(r2.rep), cs = character(s), ct = character(t);
      for (Element g = 0; g < p.group->order(); ++g) {
        worst_char = std::max({worst_char, std::abs(cs[g] - (c1[g] + c2[g])), std::abs(ct[g] - c1[g] * c2[g])});
      }
      for (const auto& h : all_subgroups(p.group)) {
        const CMatrix proj = fixed_subspace_projector(r1.rep, h);
        worst_proj = std::max(worst_proj, (proj * proj - proj).norm());
      }
      for (const auto& b : isotypic_decomposition(t).blocks)
        for (Element g = 0; g < p.group->order(); ++g) {
          const Element gx = Element((g / p.b) * p.b), gy = Element(g % p.b);
          worst_fact = std::max(worst_fact, std::abs(b.character[g] - b.character[gx] * b.character[gy]));
          worst_fact = std::max(worst_fact, (t.matrix(g) * b.basis - b.character[g] * b.basis).norm() /
                                                std::max(1.0, b.basis.norm()));
        }
    } catch (const Error& e) {
      o.require(false, tag + e.what());
    }
    ++cases;
  }
  o.require(worst_char <= kCharacterTol, "character defect " + fmt(worst_char));
  o.require(worst_proj <= kProjectorTol, "projector defect " + fmt(worst_proj));
  o.require(worst_fact <= kFactorizationTol, "block character defect " + fmt(worst_fact));

  // Regular representation of C_N: each character exactly once.
  for (std::size_t n = 1; n <= 8; ++n) {
    auto g = share(cyclic_group(n));
    auto dec = isotypic_decomposition(complexify(regular_representation(g)));
    std::set<long> ks;
    bool ones = dec.blocks.size() == n;
    for (const auto& b : dec.blocks) {
      ones = ones && b.basis.cols() == 1;
      if (n > 1) ks.insert(std::lround(std::arg(b.character[1]) * double(n) / (2 * std::numbers::pi) + double(n)) % long(n));
    }
    o.require(ones && (n == 1 || ks.size() == n), "regular C" + std::to_string(n) + " multiplicities");
    ++cases;
  }
  o.require(cases >= 200, "only " + std::to_string(cases) + " cases");
  if (o.pass)
    o.detail = std::to_string(cases) + " cases; character " + fmt(worst_char) + ", projector " + fmt(worst_proj) +
               ", block factorization " + fmt(worst_fact);
  return o;
}

// ------------------------------------------------------------------ 6

RepresentationTable map_rows(const RepresentationTable& f, const RMatrix& m) {
  return RepresentationTable(f.rows() * m.transpose());
}

Outcome invariance_suite() {
  Outcome o;
  std::mt19937 rng(77);
  std::size_t checks = 0;
  for (std::size_t trial = 0; trial < kInvarianceTrials; ++trial) {
    const std::size_t n = 3 + trial % 3;
    auto wg = world_group(n);
    const auto coarse = position_colour_decomposition(wg);
    const auto& d = rng() % 2 ? wg.decomposition : coarse;
    RepresentationTable f = [&] {
      switch (rng() % 4) {
        case 0: return canonical_table(n);
        case 1: return coordinate_table(n);
        case 2: return phase_mixed_table(n, PhaseMixing::XC);
        default: return phase_mixed_table(n, PhaseMixing::XY);
      }
    }();
    const auto base = certify(f, wg.action, d);
    auto same = [&](const CertificationReport& r) {
      return r.verdict_disentangled == base.verdict_disentangled &&
             r.verdict_linear_disentangled == base.verdict_linear_disentangled;
    };
    const auto dim = Eigen::Index(f.dim());
    const std::string tag = "trial " + std::to_string(trial) + ": ";

    std::vector<int> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    RMatrix pm = RMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) pm(k, perm[std::size_t(k)]) = 1.0;
    o.require(same(certify(map_rows(f, pm), wg.action, d)), tag + "permutation changed the verdict");

    std::uniform_real_distribution<double> mag(0.1, 10.0);
    RMatrix sc = RMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) sc(k, k) = (rng() % 2 ? 1.0 : -1.0) * mag(rng);
    o.require(same(certify(map_rows(f, sc), wg.action, d)), tag + "scaling changed the verdict");

    if (base.linear_fit_passed) {
      const RMatrix q = gen::random_orthogonal(rng, dim);
      o.require(same(certify(map_rows(f, q), wg.action, d)), tag + "orthogonal mixing changed the verdict");
    }

    // Linear path on representations directly.
    auto p = gen::random_cyclic_pair(rng, 6);
    auto r = gen::random_real_representation(rng, p, 1 + rng() % 4);
    auto v0 = is_disentangled_representation(r, p.decomposition);
    const RMatrix q = gen::random_orthogonal(rng, Eigen::Index(r.dim()));
    auto v1 = is_disentangled_representation(change_basis(r, q.cast<Complex>()), p.decomposition);
    o.require(v0.disentangled == v1.disentangled &&
                  v0.decomposition.block_dims() == v1.decomposition.block_dims(),
              tag + "orthogonal conjugation changed the representation verdict");
    ++checks;
  }
  if (o.pass) o.detail = std::to_string(checks) + " seeded trials: permutation, scaling, orthogonal conjugation";
  return o;
}

// ------------------------------------------------------------------ 7

/// Re-checks a group-validation witness against the faulty table itself.
bool group_witness_holds(const std::vector<Element>& t, std::size_t n, const Error& e) {
  auto at = [&](std::size_t a, std::size_t b) { return t[a * n + b]; };
  if (auto* ni = dynamic_cast<const NotInvertible*>(&e)) {
    std::set<Element> seen;
    for (std::size_t k = 0; k < n; ++k)
      seen.insert(ni->line == NotInvertible::Line::Row ? at(ni->index, k) : at(k, ni->index));
    return seen.size() < n;
  }
  if (auto* na = dynamic_cast<const NotAssociative*>(&e)) return at(at(na->x, na->y), na->z) != at(na->x, at(na->y, na->z));
  if (dynamic_cast<const NoIdentity*>(&e)) {
    for (std::size_t c = 0; c < n; ++c) {
      bool two_sided = true;
      for (std::size_t x = 0; x < n && two_sided; ++x) two_sided = at(c, x) == x && at(x, c) == x;
      if (two_sided) return false;
    }
    return true;
  }
  return false;
}

bool action_witness_holds(const FiniteGroup& g, const std::vector<Point>& t, std::size_t m, const Error& e) {
  auto at = [&](std::size_t a, std::size_t x) { return t[a * m + x]; };
  if (auto* iv = dynamic_cast<const IdentityAxiomViolated*>(&e)) return at(g.identity(), iv->point) != iv->point;
  if (auto* cv = dynamic_cast<const CompatibilityViolated*>(&e))
    return at(g.mul(Element(cv->g), Element(cv->h)), cv->point) != at(cv->g, at(cv->h, cv->point));
  return false;
}

Outcome exactness_suite() {
  Outcome o;
  std::mt19937 rng(7);
  std::size_t groups = 0, actions = 0, faults = 0;

  std::vector<std::pair<std::string, GroupPtr>> gs;
  for (std::size_t n = 1; n <= 16; ++n) gs.emplace_back("C" + std::to_string(n), share(cyclic_group(n)));
  for (std::size_t a = 2; a <= 6; ++a)
    for (std::size_t b = 2; b <= 6; ++b)
      gs.emplace_back("C" + std::to_string(a) + "xC" + std::to_string(b),
                      share(direct_product(cyclic_group(a), cyclic_group(b))));
  gs.emplace_back("cube", share(cube_rotation_group()));
  std::vector<WorldGroup> worlds;
  for (std::size_t n = 2; n <= 8; ++n) {
    worlds.push_back(world_group(n));
    gs.emplace_back("world" + std::to_string(n), worlds.back().group);
  }

  for (const auto& [name, g] : gs) {
    const std::vector<Element> table(g->cayley().begin(), g->cayley().end());
    try {
      validate_group(table, {});
    } catch (const Error& e) {
      o.require(false, name + " rejected: " + e.what());
    }
    ++groups;
    if (g->order() < 2) continue;
    for (std::size_t k = 0; k < kFaultsPerTable; ++k) {
      auto bad = table;
      const std::size_t pos = rng() % bad.size();
      bad[pos] = Element((bad[pos] + 1 + rng() % (g->order() - 1)) % g->order());
      try {
        validate_group(bad, {});
        o.require(false, name + ": fault at " + std::to_string(pos) + " undetected");
      } catch (const Error& e) {
        o.require(group_witness_holds(bad, g->order(), e), name + ": witness does not hold (" + e.what() + ")");
      }
      ++faults;
    }
  }

  // Actions: world actions and product actions of shifts; the product ones
  // also carry their product structure.
  struct NamedAction {
    std::string name;
    FiniteAction action;
    std::optional<std::pair<DirectProductDecomposition, ProductStructure>> product;
  };
  std::vector<NamedAction> as;
  for (const auto& wg : worlds)
    as.push_back({"world" + std::to_string(wg.n), wg.action,
                  std::make_pair(wg.decomposition, ProductStructure::lexicographic({wg.n, wg.n, wg.n}))});
  auto shift = [](std::size_t n) {
    std::vector<Point> t(n * n);
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t x = 0; x < n; ++x) t[g * n + x] = Point((g + x) % n);
    return validate_action(std::make_shared<const FiniteGroup>(cyclic_group(n)), n, t);
  };
  for (std::size_t a = 2; a <= 5; ++a)
    for (std::size_t b = 2; b <= 5; ++b) {
      auto p = product_action(shift(a), shift(b));
      as.push_back({"shift" + std::to_string(a) + "x" + std::to_string(b), p.action,
                    std::make_pair(p.decomposition, p.structure)});
    }

  for (const auto& na : as) {
    const auto& g = *na.action.group();
    const std::vector<Point> table(na.action.table().begin(), na.action.table().end());
    const std::size_t m = na.action.set_size();
    try {
      validate_action(na.action.group(), m, table);
    } catch (const Error& e) {
      o.require(false, na.name + " action rejected: " + e.what());
    }
    if (na.product)
      o.require(is_disentangled_action(na.action, na.product->first, na.product->second).disentangled,
                na.name + ": product action not disentangled");
    ++actions;
    for (std::size_t k = 0; k < kFaultsPerTable; ++k) {
      auto bad = table;
      const std::size_t pos = rng() % bad.size();
      bad[pos] = Point((bad[pos] + 1 + rng() % (m - 1)) % m);
      try {
        validate_action(na.action.group(), m, bad);
        o.require(false, na.name + ": action fault at " + std::to_string(pos) + " undetected");
      } catch (const Error& e) {
        o.require(action_witness_holds(g, bad, m, e), na.name + ": witness does not hold (" + e.what() + ")");
      }
      ++faults;
    }
  }
  if (o.pass)
    o.detail = std::to_string(groups) + " groups and " + std::to_string(actions) + " actions exact; " +
               std::to_string(faults) + " injected faults caught with verified witnesses";
  return o;
}

// ------------------------------------------------------------------ 8

Outcome dataset_determinism(const fs::path& dir) {
  Outcome o;
  const auto a = dir / "gen_a", b = dir / "gen_b";
  auto ra = proc::run_cli("world gen --n 4 --out " + proc::quote(a.string()));
  auto rb = proc::run_cli("world gen --n 4 --out " + proc::quote(b.string()));
  o.require(ra.status == 0 && rb.status == 0, "world gen failed");
  if (!o.pass) return o;
  const auto ma = io::read_file(a / "manifest.json"), mb = io::read_file(b / "manifest.json");
  o.require(ma == mb, "manifests differ");
  o.require(sha256_hex(ma) == sha256_hex(mb), "manifest hashes differ");
  const auto j = io::json::parse(ma);
  std::size_t pgms = 0;
  for (const auto& e : j["files"]) {
    const auto path = e["path"].get<std::string>();
    if (path.ends_with(".pgm")) ++pgms;
    o.require(sha256_hex(io::read_file(b / path)) == e["sha256"].get<std::string>(), path + " hash mismatch");
  }
  o.require(pgms == 64, std::to_string(pgms) + " observations");
  if (o.pass) o.detail = "identical manifests (sha256 " + sha256_hex(ma).substr(0, 16) + "...), 64 PGMs verified";
  return o;
}

}  // namespace

int main() {
  const auto dir = work_dir();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"linear worked example (canonical embedding, N=2..8)", [&] { return linear_worked_example(dir); }},
      {"nonlinear worked example (coordinate embedding)", [&] { return nonlinear_worked_example(dir); }},
      {"finite non-decomposability (cube, C6, C12)", non_decomposability},
      {"decomposition relativity (45-degree mixing)", [&] { return decomposition_relativity(dir); }},
      {"representation-theory property suite", representation_properties},
      {"invariance suite", invariance_suite},
      {"exactness suite", exactness_suite},
      {"dataset determinism", [&] { return dataset_determinism(dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].first << " -- " << o.detail
              << " (" << fmt(seconds_since(t0)) << " s)" << std::endl;
  }
  fs::remove_all(dir);
  std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
