// symcert: command-line front end for group validation and decomposition,
// grid-world dataset generation, representation checks and certification.
//
// Exit codes: 0 success / disentangled, 2 invalid input, 3 valid input but
// entangled.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "symcert/symcert.hpp"

namespace fs = std::filesystem;
using namespace symcert;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitEntangled = 3;

struct CommandConfig {
  std::string input;
  std::string decomposition;
  std::string world_dir;
  std::string rep_table;
  std::string out;
  std::string report;
  std::string demo_name;
  std::string variant = "canonical";
  std::size_t n = 8;
  std::size_t cell_pixels = 8;
  std::size_t max_factors = 3;
  std::optional<double> tol_eq;
  double tol_nl = 1e-3;
  double tol_rep = kDefaultTolRep;
  double tol_lin = kDefaultTolLin;
  unsigned seed = 0;
};

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
}

void print_report(const CertificationReport& r) {
  std::cout << "well_defined: " << (r.well_definedness.well_defined ? "true" : "false") << " ("
            << r.well_definedness.collisions.size() << " collisions)\n";
  if (r.linear_fit) {
    std::cout << "linear action (" << (r.linear_fit->supplied ? "supplied" : "least squares")
              << "): equivariance residual " << r.linear_fit->equivariance_residual << ", relative "
              << r.linear_fit->relative_equivariance_residual << ", homomorphism residual "
              << r.linear_fit->homomorphism_residual << (r.linear_fit_passed ? " [pass]" : " [fail]") << "\n";
  }
  if (r.linear_fit_failure) std::cout << "linear action: " << *r.linear_fit_failure << "\n";
  if (r.linear_verdict)
    std::cout << "invariant blocks: " << r.linear_verdict->decomposition.blocks.size() << " (dims "
              << join(r.block_dims()) << "), deficit " << r.linear_verdict->deficit << "\n";
  std::cout << "coordinate test: " << (r.coordinate_verdict ? "block-diagonal" : "mixed") << "\n";
  std::cout << "verdict_disentangled: " << (r.verdict_disentangled ? "true" : "false") << "\n";
  std::cout << "verdict_linear_disentangled: " << (r.verdict_linear_disentangled ? "true" : "false") << "\n";
  std::cout << "compactness: " << join(r.metrics.compactness) << "\n";
  double min_mod = 1.0;
  for (const auto& m : r.metrics.modularity)
    if (m) min_mod = std::min(min_mod, *m);
  std::cout << "min modularity: " << min_mod << "\n";
  if (r.metrics.explicitness) std::cout << "explicitness: " << *r.metrics.explicitness << "\n";
}

void emit_report(const CertificationReport& r, const std::string& path) {
  const auto j = io::report_to_json(r);
  if (path.empty())
    std::cout << j.dump(2) << "\n";
  else
    io::write_file(path, j.dump(2) + "\n");
}

std::vector<RMatrix> canonical_generator_matrices(const WorldGroup& wg) {
  std::vector<RMatrix> m;
  for (Element g : wg.generators) m.push_back(canonical_linear_action(wg.n, wg.offsets(g)));
  return m;
}

CertifyOptions grid_options(const WorldGroup& wg, const CommandConfig& cfg) {
  CertifyOptions opt;
  opt.tol.eq = cfg.tol_eq.value_or(1e-9);
  opt.tol.nl = cfg.tol_nl;
  opt.tol.rep = cfg.tol_rep;
  opt.tol.lin = cfg.tol_lin;
  opt.generators.assign(wg.generators.begin(), wg.generators.end());
  opt.ground_truth = canonical_table(wg.n);
  return opt;
}

// ------------------------------------------------------------------ world

int cmd_world_gen(const CommandConfig& cfg) {
  const auto spec = make_grid_spec(cfg.n, cfg.cell_pixels);
  const auto manifest = export_dataset(spec, cfg.out);
  std::cout << "wrote " << manifest.entries.size() << " files; manifest " << manifest.file.string() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ group

int cmd_group_validate(const CommandConfig& cfg) {
  const auto g = io::load_group(cfg.input);
  std::cout << "valid group of order " << g->order() << ", identity " << g->identity() << " ("
            << g->label(g->identity()) << "), " << (is_abelian(*g) ? "abelian" : "non-abelian") << "\n";
  return kExitOk;
}

int cmd_group_decompose(const CommandConfig& cfg) {
  const auto g = io::load_group(cfg.input);
  const auto found = find_direct_decompositions(g, cfg.max_factors);
  json out = json::array();
  for (const auto& d : found) {
    std::cout << "decomposition: factor orders {" << join(d.factor_orders()) << "}\n";
    out.push_back(io::decomposition_to_json(d, json(nullptr)));
  }
  if (found.empty()) std::cout << "indecomposable: 0 direct-product decompositions found\n";
  else std::cout << found.size() << " direct-product decomposition(s) found\n";
  const json doc{{"order", g->order()}, {"max_factors", cfg.max_factors}, {"decompositions", out}};
  if (!cfg.out.empty()) io::write_file(cfg.out, doc.dump(2) + "\n");
  else std::cout << doc.dump() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ action

int cmd_action_check(const CommandConfig& cfg) {
  const auto a = io::load_action(cfg.input);
  const auto d = io::load_decomposition(cfg.decomposition, a.group());
  std::cout << "valid action of a group of order " << a.group()->order() << " on " << a.set_size() << " points; "
            << orbits(a).size() << " orbit(s)" << (is_free(a) ? ", free" : "") << "\n";
  const auto p = search_product_structure(a, d);
  if (!p) {
    std::cout << "no disentangling product structure found\n";
    return kExitEntangled;
  }
  const auto v = is_disentangled_action(a, d, *p);
  std::cout << "product structure: factor sizes {" << join(p->factor_sizes()) << "}; disentangled: "
            << (v.disentangled ? "true" : "false") << "\n";
  return v.disentangled ? kExitOk : kExitEntangled;
}

// ------------------------------------------------------------------ rep

int cmd_rep_validate(const CommandConfig& cfg) {
  const auto r = io::load_representation(cfg.input, cfg.tol_rep);
  std::cout << "valid " << (r.field() == Field::Real ? "real" : "complex") << " representation of dimension "
            << r.dim() << "; max homomorphism residual " << r.homomorphism_residual() << "\n";
  return kExitOk;
}

int cmd_rep_certify(const CommandConfig& cfg) {
  const auto r = io::load_representation(cfg.input, cfg.tol_rep);
  const auto d = io::load_decomposition(cfg.decomposition, r.group());
  const auto v = is_disentangled_representation(r, d, cfg.tol_lin);
  std::cout << "blocks: " << v.decomposition.blocks.size() << " (dims " << join(v.decomposition.block_dims())
            << "), deficit " << v.deficit << "\n";
  std::cout << "linearly disentangled: " << (v.disentangled ? "true" : "false") << "\n";
  if (!cfg.report.empty()) {
    const json j{{"schema", io::kReportSchema},
                 {"disentangled", v.disentangled},
                 {"deficit", v.deficit},
                 {"orthonormality_residual", io::round12(v.orthonormality_residual)},
                 {"blocks", io::subspace_decomposition_to_json(v.decomposition, r.field() == Field::Real)}};
    io::write_file(cfg.report, j.dump(2) + "\n");
  }
  return v.disentangled ? kExitOk : kExitEntangled;
}

// ------------------------------------------------------------------ certify

int cmd_certify(const CommandConfig& cfg) {
  const auto world = load_world(cfg.world_dir);
  const auto f = io::load_table(cfg.rep_table, world.spec.num_states());
  const auto d = io::load_decomposition(cfg.decomposition, world.action.group());
  CertifyOptions opt;
  opt.tol.eq = cfg.tol_eq.value_or(kImportedTolEq);
  opt.tol.nl = cfg.tol_nl;
  opt.tol.rep = cfg.tol_rep;
  opt.tol.lin = cfg.tol_lin;
  opt.ground_truth = canonical_table(world.spec.n);
  const auto r = certify(f, world.action, d, opt);
  print_report(r);
  emit_report(r, cfg.report);
  return r.verdict_disentangled ? kExitOk : kExitEntangled;
}

// ------------------------------------------------------------------ demos

void maybe_write_world(const CommandConfig& cfg, const RepresentationTable& table, const CertificationReport& r) {
  if (cfg.out.empty()) return;
  export_dataset(make_grid_spec(cfg.n, cfg.cell_pixels), cfg.out);
  io::write_file(fs::path(cfg.out) / "table.csv", io::table_to_csv(table));
  io::write_file(fs::path(cfg.out) / "report.json", io::report_to_json(r).dump(2) + "\n");
  std::cout << "wrote dataset, table.csv and report.json to " << cfg.out << "\n";
}

int demo_linear_grid(const CommandConfig& cfg) {
  const auto wg = world_group(cfg.n);
  auto opt = grid_options(wg, cfg);
  if (cfg.variant == "canonical") {
    std::cout << "canonical embedding f(x,y,c) = (e^{2 pi i x/N}, e^{2 pi i y/N}, e^{2 pi i c/N}), N = " << cfg.n
              << ", certified w.r.t. G_x x G_y x G_c with the block-rotation action\n";
    const auto table = canonical_table(cfg.n);
    opt.supplied_action = canonical_generator_matrices(wg);
    const auto r = certify(table, wg.action, wg.decomposition, opt);
    print_report(r);
    maybe_write_world(cfg, table, r);
    return kExitOk;
  }
  PhaseMixing mixing;
  if (cfg.variant == "mixed-xc") mixing = PhaseMixing::XC;
  else if (cfg.variant == "mixed-xy") mixing = PhaseMixing::XY;
  else throw InvalidArgument("unknown variant " + cfg.variant);
  const auto table = phase_mixed_table(cfg.n, mixing);
  std::cout << "45-degree " << (mixing == PhaseMixing::XC ? "x/colour" : "x/y") << " phase mixing, N = " << cfg.n
            << "\n-- w.r.t. G_x x G_y x G_c\n";
  const auto fine = certify(table, wg.action, wg.decomposition, opt);
  print_report(fine);
  std::cout << "-- w.r.t. G_p x G_c\n";
  const auto coarse = certify(table, wg.action, position_colour_decomposition(wg), opt);
  print_report(coarse);
  maybe_write_world(cfg, table, fine);
  return kExitOk;
}

int demo_grid(const CommandConfig& cfg) {
  const auto wg = world_group(cfg.n);
  const auto table = coordinate_table(cfg.n);
  std::cout << "coordinate embedding f(x,y,c) = (x, y, c), N = " << cfg.n
            << ", certified w.r.t. G_x x G_y x G_c\n";
  const auto r = certify(table, wg.action, wg.decomposition, grid_options(wg, cfg));
  print_report(r);
  maybe_write_world(cfg, table, r);
  return kExitOk;
}

int demo_so3(const CommandConfig&) {
  auto g = std::make_shared<const FiniteGroup>(cube_rotation_group());
  const auto [rz, rx] = cube_quarter_turns();
  std::cout << "cube rotation group: order " << g->order() << ", " << (is_abelian(*g) ? "abelian" : "non-abelian")
            << "\n";
  std::size_t quarter_axes = 0;
  for (const auto& s : all_subgroups(g))
    if (s.order() == 4 && s.generators().size() == 1 && g->element_order(s.generators()[0]) == 4) ++quarter_axes;
  const std::array<Element, 2> pair{rz, rx};
  std::cout << quarter_axes << " face-axis quarter-turn subgroups; two of them generate a group of order "
            << generated_members(*g, pair).size() << "; their generators "
            << (g->mul(rz, rx) == g->mul(rx, rz) ? "commute" : "do not commute") << "\n";
  const auto found = find_direct_decompositions(g, 4);
  std::cout << found.size() << " direct-product decompositions found\n";
  return kExitOk;
}

int cmd_demo(const CommandConfig& cfg) {
  if (cfg.demo_name == "grid") return demo_grid(cfg);
  if (cfg.demo_name == "linear-grid") return demo_linear_grid(cfg);
  if (cfg.demo_name == "so3") return demo_so3(cfg);
  throw InvalidArgument("unknown demo " + cfg.demo_name);
}

}  // namespace

int main(int argc, char** argv) {
  std::cout << std::setprecision(12);
  CLI::App app{"symcert: symmetry-based certification of disentangled representations"};
  app.require_subcommand(1);
  CommandConfig cfg;
  std::function<int(const CommandConfig&)> run;

  auto tolerance_flags = [&](CLI::App* sub) {
    sub->add_option("--tol-rep", cfg.tol_rep, "homomorphism tolerance for representations");
    sub->add_option("--tol-lin", cfg.tol_lin, "subspace tolerance for projector checks");
  };

  auto* world = app.add_subcommand("world", "grid-world datasets");
  world->require_subcommand(1);
  auto* gen = world->add_subcommand("gen", "render every state and write the dataset");
  gen->add_option("--n", cfg.n, "grid size / colour count")->required();
  gen->add_option("--out", cfg.out, "output directory")->required();
  gen->add_option("--cell-pixels", cfg.cell_pixels, "pixels per grid cell");
  gen->callback([&] { run = cmd_world_gen; });

  auto* group = app.add_subcommand("group", "finite groups given as Cayley tables");
  group->require_subcommand(1);
  auto* gval = group->add_subcommand("validate", "check the group axioms");
  gval->add_option("file", cfg.input)->required();
  gval->callback([&] { run = cmd_group_validate; });
  auto* gdec = group->add_subcommand("decompose", "list internal direct-product decompositions");
  gdec->add_option("file", cfg.input)->required();
  gdec->add_option("--max-factors", cfg.max_factors, "largest number of factors");
  gdec->add_option("--out", cfg.out, "write decompositions as JSON");
  gdec->callback([&] { run = cmd_group_decompose; });

  auto* action = app.add_subcommand("action", "group actions on finite sets");
  action->require_subcommand(1);
  auto* acheck = action->add_subcommand("check", "validate an action and test it for disentanglement");
  acheck->add_option("file", cfg.input)->required();
  acheck->add_option("--decomposition", cfg.decomposition)->required();
  acheck->callback([&] { run = cmd_action_check; });

  auto* rep = app.add_subcommand("rep", "linear representations");
  rep->require_subcommand(1);
  auto* rval = rep->add_subcommand("validate", "check the homomorphism property");
  rval->add_option("file", cfg.input)->required();
  tolerance_flags(rval);
  rval->callback([&] { run = cmd_rep_validate; });
  auto* rcert = rep->add_subcommand("certify", "test a representation for linear disentanglement");
  rcert->add_option("file", cfg.input)->required();
  rcert->add_option("--decomposition", cfg.decomposition)->required();
  rcert->add_option("--report", cfg.report, "write the verdict as JSON");
  tolerance_flags(rcert);
  rcert->callback([&] { run = cmd_rep_certify; });

  auto* cert = app.add_subcommand("certify", "certify a representation table against a world");
  cert->add_option("--world", cfg.world_dir, "dataset directory from `world gen`")->required();
  cert->add_option("--rep", cfg.rep_table, "representation table CSV")->required();
  cert->add_option("--decomposition", cfg.decomposition, "decomposition JSON")->required();
  cert->add_option("--tol-eq", cfg.tol_eq, "equivariance tolerance (default 1e-6)");
  cert->add_option("--tol-nl", cfg.tol_nl, "relative off-factor sensitivity tolerance");
  cert->add_option("--report", cfg.report, "report JSON path (default: stdout)");
  tolerance_flags(cert);
  cert->callback([&] { run = cmd_certify; });

  auto* demo = app.add_subcommand("demo", "worked examples: grid, linear-grid, so3");
  demo->add_option("name", cfg.demo_name)->required()->check(CLI::IsMember({"grid", "linear-grid", "so3"}));
  demo->add_option("--n", cfg.n, "grid size");
  demo->add_option("--variant", cfg.variant, "linear-grid table: canonical, mixed-xc, mixed-xy");
  demo->add_option("--out", cfg.out, "also write dataset, table and report here");
  demo->add_option("--cell-pixels", cfg.cell_pixels, "pixels per grid cell");
  demo->add_option("--seed", cfg.seed, "seed for randomized steps");
  demo->add_option("--tol-eq", cfg.tol_eq, "equivariance tolerance (default 1e-9)");
  demo->callback([&] { run = cmd_demo; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (cfg.tol_eq) require_positive(*cfg.tol_eq, "--tol-eq");
    require_positive(cfg.tol_nl, "--tol-nl");
    require_positive(cfg.tol_rep, "--tol-rep");
    require_positive(cfg.tol_lin, "--tol-lin");
    return run(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
