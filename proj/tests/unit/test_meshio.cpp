#include "decflow/error.hpp"
#include "decflow/geometry.hpp"
#include "decflow/meshio.hpp"
#include "support.hpp"

#include <Eigen/LU>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace decflow;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

/// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("decflow_meshio_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double total_area(const MeshData& mesh) {
  const auto c = mesh.to_complex();
  double a = 0.0;
  for (int t = 0; t < c.num_cells(); ++t) a += simplex_volume(c.simplex_points(c.dim(), t));
  return a;
}

}  // namespace

TEST_CASE("minimal node/ele pair") {
  TempDir dir;
  write_text(dir.path / "t.node", "# a triangle\n3 2 0 0\n0 0.0 0.0\n1 1.0 0.0\n2 0.0 1.0\n");
  write_text(dir.path / "t.ele", "1 3 0\n0 0 1 2  # only cell\n");
  const auto m = read_node_ele(dir.path / "t.node", dir.path / "t.ele");
  CHECK(m.dim() == 2);
  CHECK(m.vertices.rows() == 3);
  CHECK(m.cells == std::vector<std::vector<int>>{{0, 1, 2}});
  CHECK(m.regions.empty());
  CHECK(m.to_complex().num_cells() == 1);
}

TEST_CASE("1-based files load like 0-based ones") {
  const auto zero = test::load_fixture("hexagon");
  const auto one = test::load_fixture("hexagon_one_based");
  CHECK(zero.vertices == one.vertices);
  CHECK(zero.cells == one.cells);
}

TEST_CASE("region attributes pass through") {
  const auto m = test::load_fixture("diagonal_regions");
  REQUIRE(m.regions.size() == m.cells.size());
  CHECK(m.regions == std::vector<double>{1.0, 2.0});
  TempDir dir;
  write_node_ele(dir.path / "r", m);
  const auto back = read_node_ele(dir.path / "r.node", dir.path / "r.ele");
  CHECK(back.regions == m.regions);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(test::load_fixture("malformed"), ParseError);
  TempDir dir;
  const auto node = dir.path / "m.node";
  const auto ele = dir.path / "m.ele";
  const std::string good_node = "3 2 0 0\n0 0 0\n1 1 0\n2 0 1\n";
  SUBCASE("index out of range") {
    write_text(node, good_node);
    write_text(ele, "1 3 0\n0 0 1 3\n");
    CHECK_THROWS_AS(read_node_ele(node, ele), ParseError);
  }
  SUBCASE("mixed indexing") {
    write_text(node, "3 2 0 0\n0 0 0\n2 1 0\n3 0 1\n");
    write_text(ele, "1 3 0\n0 0 1 2\n");
    CHECK_THROWS_AS(read_node_ele(node, ele), ParseError);
  }
  SUBCASE("bad header") {
    write_text(node, "three 2 0 0\n");
    write_text(ele, "1 3 0\n0 0 1 2\n");
    CHECK_THROWS_AS(read_node_ele(node, ele), ParseError);
  }
  SUBCASE("element size does not match the dimension") {
    write_text(node, good_node);
    write_text(ele, "1 4 0\n0 0 1 2 0\n");
    CHECK_THROWS_AS(read_node_ele(node, ele), ParseError);
  }
  SUBCASE("not a number") {
    write_text(node, "3 2 0 0\n0 0 0\n1 x 0\n2 0 1\n");
    write_text(ele, "1 3 0\n0 0 1 2\n");
    CHECK_THROWS_AS(read_node_ele(node, ele), ParseError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(read_node_ele(dir.path / "none.node", ele), Error); }
}

TEST_CASE("coordinates survive a write/read round trip") {
  auto m = test::unit_square(5, GridPattern::offset_columns, 0.2, 11);
  m.vertices(7, 0) = 0.1 + 1e-16 * 3;
  m.vertices(8, 1) = 1.0 / 3.0;
  TempDir dir;
  write_node_ele(dir.path / "rt", m);
  const auto back = read_node_ele(dir.path / "rt.node", dir.path / "rt.ele");
  CHECK(back.vertices == m.vertices);
  CHECK(back.cells == m.cells);
  const auto cube = test::unit_cube(2);
  write_node_ele(dir.path / "cube", cube);
  CHECK(read_node_ele(dir.path / "cube.node", dir.path / "cube.ele").vertices == cube.vertices);
}

TEST_CASE("structured generator counts") {
  const auto sq2 = test::unit_square(2);
  CHECK(sq2.vertices.rows() == 9);
  CHECK(sq2.cells.size() == 8);
  const auto sq1 = test::unit_square(1);
  CHECK(sq1.cells.size() == 2);
  const auto c1 = sq1.to_complex();
  CHECK(c1.interior_faces().size() == 1);  // the shared diagonal
  const auto rect = generate_structured(Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 1), {4, 3});
  CHECK(rect.vertices.rows() == 20);
  CHECK(rect.cells.size() == 24);
  CHECK(total_area(rect) == Approx(2.0));
  CHECK(total_area(test::unit_square(6, GridPattern::offset_rows)) == Approx(1.0));
  CHECK(total_area(test::unit_square(6, GridPattern::offset_columns, 0.2, 4)) == Approx(1.0));
}

TEST_CASE("Kuhn split of the unit cube") {
  const auto cube = test::unit_cube(1);
  CHECK(cube.vertices.rows() == 8);
  REQUIRE(cube.cells.size() == 6);
  for (const auto& t : cube.cells) {
    Eigen::Matrix3d e;
    for (int i = 0; i < 3; ++i)
      e.col(i) = (cube.vertices.row(t[static_cast<std::size_t>(i + 1)]) - cube.vertices.row(t[0])).transpose();
    CHECK(e.determinant() == Approx(1.0));  // 6 times the volume 1/6
  }
  CHECK(test::unit_cube(3).cells.size() == 6 * 27);
}

TEST_CASE("generator errors") {
  CHECK_THROWS_AS(generate_structured(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), {0, 2}), MeshError);
  CHECK_THROWS_AS(generate_structured(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1), {2, 2}), MeshError);
  CHECK_THROWS_AS(generate_structured(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), {2, 2, 2}), MeshError);
  GridOptions offset;
  offset.pattern = GridPattern::offset_columns;
  CHECK_THROWS_AS(generate_structured(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1), {2, 2, 2}, offset),
                  MeshError);
  CHECK_THROWS_AS(refine_4to1(test::unit_cube(1)), MeshError);
}

TEST_CASE("generated meshes are Delaunay") {
  for (auto pattern : {GridPattern::right, GridPattern::offset_columns, GridPattern::offset_rows})
    for (double perturb : {0.0, 0.2}) {
      const auto c = test::unit_square(7, pattern, perturb, 5).to_complex();
      CHECK(is_delaunay(c, dual_measures(c)).ok);
    }
  const auto c3 = test::unit_cube(2).to_complex();
  CHECK(is_delaunay(c3, dual_measures(c3)).ok);
}

TEST_CASE("4-to-1 refinement") {
  const auto tri = test::single_triangle({0, 0}, {1, 0}, {0.3, 0.8});
  const auto r = refine_4to1(tri);
  CHECK(r.vertices.rows() == 6);
  CHECK(r.cells.size() == 4);
  const auto rc = r.to_complex();
  for (int t = 0; t < 4; ++t) CHECK(simplex_volume(rc.simplex_points(2, t)) == Approx(0.4 / 4));

  const auto sq = test::unit_square(2);
  const auto rs = refine_4to1(sq);
  CHECK(rs.cells.size() == 32);
  const auto c = sq.to_complex();
  CHECK(rs.vertices.rows() == c.num_vertices() + c.count(1));
  CHECK(total_area(rs) == Approx(1.0).epsilon(1e-15));
  auto labelled = test::load_fixture("diagonal_regions");
  CHECK(refine_4to1(labelled).regions == std::vector<double>{1, 1, 1, 1, 2, 2, 2, 2});

  const auto complex_version = refine_4to1(c);
  CHECK(complex_version.num_cells() == 32);
  CHECK(is_delaunay(complex_version, dual_measures(complex_version)).ok);
}

TEST_CASE("Lawson flips restore the Delaunay property") {
  auto m = test::load_fixture("flipped");
  CHECK_FALSE(is_delaunay(m.to_complex(), dual_measures(m.to_complex())).ok);
  CHECK(make_delaunay(m) == 1);
  CHECK(is_delaunay(m.to_complex(), dual_measures(m.to_complex())).ok);
  CHECK(make_delaunay(m) == 0);
}

TEST_CASE("VTK output matches the golden file") {
  const auto c = test::single_triangle({0, 0}, {1, 0}, {0, 1}).to_complex();
  VtkFields fields;
  fields.cell_scalars.emplace_back("pressure", Eigen::VectorXd::Ones(1));
  fields.cell_vectors.emplace_back("velocity", Eigen::RowVector2d(1.0, 0.1));
  fields.point_scalars.emplace_back("height", Eigen::Vector3d(0.0, 0.5, 1.0 / 3.0));
  TempDir dir;
  write_vtk(dir.path / "t.vtk", c, fields);
  const auto text = read_text(dir.path / "t.vtk");
  CHECK(text.find("CELL_TYPES 1\n5\n") != std::string::npos);
  CHECK(text.find("1 0.10000000000000001 0\n") != std::string::npos);  // z padded with 0
  CHECK(text == read_text(test::data_path("single_triangle.vtk")));

  VtkFields wrong;
  wrong.cell_scalars.emplace_back("pressure", Eigen::VectorXd::Ones(2));
  CHECK_THROWS_AS(write_vtk(dir.path / "w.vtk", c, wrong), MeshError);
  CHECK_THROWS_AS(write_vtk(dir.path / "missing" / "w.vtk", c, fields), IoError);

  const auto cube = test::unit_cube(1).to_complex();
  write_vtk(dir.path / "c.vtk", cube, {});
  CHECK(read_text(dir.path / "c.vtk").find("CELL_TYPES 6\n10\n10\n10\n10\n10\n10\n") != std::string::npos);
}

TEST_CASE("CSV output") {
  const auto c = test::unit_square(1).to_complex();
  const auto m = dual_measures(c);
  TempDir dir;
  write_cells_csv(dir.path / "cells.csv", c, m, Eigen::Vector2d(1.5, -2.0), Eigen::MatrixXd::Ones(2, 2));
  const auto cells = read_text(dir.path / "cells.csv");
  CHECK(std::count(cells.begin(), cells.end(), '\n') == 3);
  CHECK(cells.substr(0, cells.find('\n')).find("pressure") != std::string::npos);
  write_faces_csv(dir.path / "faces.csv", c, Eigen::VectorXd::LinSpaced(5, 0.0, 4.0));
  const auto faces = read_text(dir.path / "faces.csv");
  CHECK(std::count(faces.begin(), faces.end(), '\n') == 6);
  CHECK(faces.substr(0, faces.find('\n')).find("flux") != std::string::npos);
  CHECK_THROWS_AS(write_faces_csv(dir.path / "bad.csv", c, Eigen::VectorXd::Zero(2)), MeshError);
}

TEST_CASE("atomic writes replace the target") {
  TempDir dir;
  const auto p = dir.path / "x.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  CHECK(read_text(p) == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
  CHECK(entries == 1);
}
