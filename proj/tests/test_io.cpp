#include <gtest/gtest.h>

#include <filesystem>

#include "symcert/io.hpp"
#include "symcert/world.hpp"

using namespace symcert;
namespace fs = std::filesystem;

namespace {

GroupPtr share(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("symcert_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(GroupJson, RoundTrip) {
  auto g = direct_product(cyclic_group(2), cyclic_group(3));
  auto back = io::group_from_json(io::json::parse(io::group_to_json(g).dump()));
  EXPECT_EQ(back, g);
  EXPECT_EQ(back.labels(), g.labels());
}

TEST(GroupJson, Rejections) {
  EXPECT_THROW(io::group_from_json(io::json::parse(R"({"order": 2, "cayley": [0, 1, 1]})")), SizeMismatch);
  EXPECT_THROW(io::group_from_json(io::json::parse(R"({"order": 2, "cayley": [0, 1, 1, 2]})")), InvalidArgument);
  EXPECT_THROW(io::group_from_json(io::json::parse(R"({"order": 2, "cayley": [0, 1, -1, 0]})")), InvalidArgument);
  EXPECT_THROW(io::group_from_json(io::json::parse(R"({"cayley": [0]})")), InvalidArgument);
  EXPECT_THROW(io::group_from_json(io::json::parse(R"({"order": 2, "cayley": [0, 1, 1, 1]})")), NotInvertible);
  EXPECT_THROW(io::read_json("/nonexistent/symcert.json"), IoFailure);
}

TEST(ActionJson, RelativeGroupReference) {
  auto dir = scratch("action");
  auto wg = world_group(2);
  io::write_file(dir / "g.json", io::group_to_json(*wg.group).dump());
  io::write_file(dir / "a.json", io::action_to_json(wg.action, "g.json").dump());
  auto a = io::load_action(dir / "a.json");
  EXPECT_TRUE(same_group(a.group(), wg.group));
  EXPECT_TRUE(std::equal(a.table().begin(), a.table().end(), wg.action.table().begin()));

  // Inline group object and a broken table.
  auto j = io::action_to_json(wg.action, io::group_to_json(*wg.group));
  j["table"][3] = 0;
  EXPECT_THROW(io::action_from_json(j, dir), Error);
  fs::remove_all(dir);
}

TEST(DecompositionJson, RoundTripAndMismatch) {
  auto dir = scratch("dec");
  auto wg = world_group(3);
  io::write_file(dir / "g.json", io::group_to_json(*wg.group).dump());
  io::write_file(dir / "d.json", io::decomposition_to_json(wg.decomposition, "g.json", {"x", "y", "c"}).dump());
  auto d = io::load_decomposition(dir / "d.json");
  EXPECT_EQ(d.factor_orders(), (std::vector<std::size_t>{3, 3, 3}));
  EXPECT_EQ(d.factors()[0].members(), wg.decomposition.factors()[0].members());
  EXPECT_THROW(io::load_decomposition(dir / "d.json", share(cyclic_group(27))), DecompositionMismatch);

  io::write_file(dir / "bad.json", R"({"factors": [[0, 1, 2], [0, 1, 2]]})");
  EXPECT_THROW(io::load_decomposition(dir / "bad.json", wg.group), Error);
  io::write_file(dir / "nogroup.json", R"({"factors": [[0]]})");
  EXPECT_THROW(io::load_decomposition(dir / "nogroup.json"), InvalidArgument);
  fs::remove_all(dir);
}

TEST(RepresentationJson, RealAndComplex) {
  auto dir = scratch("rep");
  auto wg = world_group(3);
  io::write_file(dir / "g.json", io::group_to_json(*wg.group).dump());
  auto real = canonical_representation(wg);
  io::write_file(dir / "r.json", io::representation_to_json(real, "g.json").dump());
  auto r = io::load_representation(dir / "r.json");
  EXPECT_EQ(r.field(), Field::Real);
  EXPECT_EQ(r.dim(), 6u);
  for (Element g = 0; g < wg.group->order(); ++g) EXPECT_LT((r.matrix(g) - real.matrix(g)).norm(), 1e-15);

  auto c = complexify(real);
  io::write_file(dir / "c.json", io::representation_to_json(c, "g.json").dump());
  auto rc = io::load_representation(dir / "c.json");
  EXPECT_EQ(rc.field(), Field::Complex);

  auto j = io::json::parse(io::read_file(dir / "r.json"));
  j["field"] = "quaternion";
  EXPECT_THROW(io::representation_from_json(j, dir), InvalidArgument);
  j["field"] = "complex";
  EXPECT_THROW(io::representation_from_json(j, dir), InvalidArgument);  // entries are not [re, im]
  j = io::json::parse(io::read_file(dir / "r.json"));
  j["matrices"][1][0][0] = 5.0;
  EXPECT_THROW(io::representation_from_json(j, dir), HomomorphismViolated);
  fs::remove_all(dir);
}

TEST(Csv, BitExactRoundTrip) {
  auto f = canonical_table(5);
  auto back = io::table_from_csv(io::table_to_csv(f));
  EXPECT_EQ(back.rows(), f.rows());
  const auto text = io::table_to_csv(f);
  EXPECT_EQ(text.substr(0, text.find('\n')), "state_id,z_0,z_1,z_2,z_3,z_4,z_5");
}

TEST(Round12, TwelveSignificantDigits) {
  EXPECT_EQ(io::round12(0.1 + 0.2), 0.3);
  EXPECT_EQ(io::round12(1.0 / 3.0), 0.333333333333);
  EXPECT_EQ(io::round12(0.0), 0.0);
}
