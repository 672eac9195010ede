#pragma once

// Dataset export for the grid world: rendered observations, state and
// transition tables, the group/action/decomposition files and a manifest of
// SHA-256 hashes.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "symcert/io.hpp"
#include "symcert/parallel.hpp"
#include "symcert/sha256.hpp"
#include "symcert/world.hpp"

namespace symcert {

struct ManifestEntry {
  std::string path;  // relative to the dataset directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct Manifest {
  std::filesystem::path file;
  std::vector<ManifestEntry> entries;
};

inline std::string observation_name(std::size_t state) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "observations/state_%05zu.pgm", state);
  return buf;
}

inline Manifest export_dataset(const GridWorldSpec& spec, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  using io::json;
  std::error_code ec;
  fs::create_directories(dir / "observations", ec);
  if (ec) throw IoFailure("cannot create " + (dir / "observations").string() + ": " + ec.message());

  const auto wg = world_group(spec.n);
  const std::size_t m = spec.num_states();

  std::vector<ManifestEntry> obs(m);
  parallel_for(m, [&](std::size_t s) {
    const auto bytes = to_pgm(render(spec, state_at(spec.n, s)));
    obs[s] = {observation_name(s), sha256_hex(bytes), bytes.size()};
    io::write_file(dir / obs[s].path, bytes);
  });

  std::vector<ManifestEntry> entries = std::move(obs);
  auto add = [&](const std::string& name, const std::string& data) {
    io::write_file(dir / name, data);
    entries.push_back({name, sha256_hex(data), data.size()});
  };

  std::string states = "state_id,x,y,c\n";
  for (std::size_t s = 0; s < m; ++s) {
    const auto w = state_at(spec.n, s);
    states += std::to_string(s) + "," + std::to_string(w.x) + "," + std::to_string(w.y) + "," + std::to_string(w.c) + "\n";
  }
  add("states.csv", states);

  std::string transitions = "state_id,element_id,next_state_id\n";
  for (std::size_t s = 0; s < m; ++s)
    for (Element g : wg.generators)
      transitions += std::to_string(s) + "," + std::to_string(g) + "," + std::to_string(wg.action.apply(g, Point(s))) + "\n";
  add("transitions.csv", transitions);

  add("group.json", io::group_to_json(*wg.group).dump());
  add("action.json", io::action_to_json(wg.action, "group.json").dump());
  add("decomposition.json", io::decomposition_to_json(wg.decomposition, "group.json", {"x", "y", "c"}).dump());
  add("decomposition_position_colour.json",
      io::decomposition_to_json(position_colour_decomposition(wg), "group.json", {"position", "colour"}).dump());

  json files = json::array();
  for (const auto& e : entries) files.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  const json manifest{{"schema", 1},
                      {"n", spec.n},
                      {"cell_pixels", spec.cell_pixels},
                      {"palette", spec.palette},
                      {"generators", wg.generators},
                      {"files", std::move(files)}};
  const auto file = dir / "manifest.json";
  io::write_file(file, manifest.dump(2) + "\n");
  return {file, std::move(entries)};
}

/// A dataset directory read back: its world size and the validated action.
struct LoadedWorld {
  GridWorldSpec spec;
  FiniteAction action;
};

inline LoadedWorld load_world(const std::filesystem::path& dir) {
  const auto manifest = io::read_json(dir / "manifest.json");
  const auto n = io::get_field<std::size_t>(manifest, "n");
  const auto cp = io::get_field<std::size_t>(manifest, "cell_pixels");
  auto spec = make_grid_spec(n, cp);
  auto action = io::load_action(dir / "action.json");
  if (action.set_size() != spec.num_states()) throw SizeMismatch(spec.num_states(), action.set_size());
  return {std::move(spec), std::move(action)};
}

}  // namespace symcert
