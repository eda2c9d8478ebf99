#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "padic/io.hpp"

using namespace padic;

namespace {

std::filesystem::path temp_path(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "padic_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("17-significant-digit formatting") {
  CHECK(fmt17(0.0) == "0");
  CHECK(fmt17(1.5) == "1.5");
  CHECK(fmt17(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("tree function JSON round trip") {
  TreeFunction f(Prime(3), 1, {0.1, -2.0, 1.0 / 3.0});
  TreeFunction g = tree_function_from_json(to_json(f));
  CHECK(g.p.value() == 3);
  CHECK(g.level == 1);
  CHECK(g.coeffs == f.coeffs);

  TreeKernel w(Prime(2), 1, {1.0, 0.25, -0.5, 1e-17});
  TreeKernel v = tree_kernel_from_json(to_json(w));
  CHECK(v.coeffs == w.coeffs);
}

TEST_CASE("network JSON round trip") {
  Prime p(2);
  NetworkParams params{p,
                       LevelPair(1, 1),
                       make_tanh(),
                       make_pwl_sigmoid(),
                       TreeKernel::constant(p, 2, 0.5),
                       TreeKernel::constant(p, 1, 1.5),
                       TreeKernel::zero(p, 2),
                       TreeFunction::constant(p, 2, -0.25),
                       TreeFunction::zero(p, 2)};
  NetworkParams back = network_from_json(to_json(params));
  CHECK(back.levels.L == 1);
  CHECK(back.levels.Delta == 1);
  CHECK(back.phi.name == "tanh");
  CHECK(back.varphi.name == "pwl_sigmoid");
  CHECK(back.W.coeffs == params.W.coeffs);
  CHECK(back.xi.coeffs == params.xi.coeffs);
}

TEST_CASE("layered net JSON round trip") {
  LayeredNet net{{2, 1},
                 {{{0.5, -1.0}}},
                 {{0.25}},
                 make_tanh(),
                 false};
  LayeredNet back = layered_net_from_json(to_json(net));
  CHECK(back.widths == net.widths);
  CHECK(back.weights == net.weights);
  CHECK(back.biases == net.biases);
  CHECK_FALSE(back.tied);
}

TEST_CASE("priors JSON") {
  const char* text = R"({
    "p": 2, "level": 1,
    "W": {"form": "iid", "sigma2": 1.0},
    "W_in": {"form": "separable", "A": [[1.0, 0.0], [0.0, 1.0]],
             "B": [[2.0, 0.0], [0.0, 2.0]]},
    "W_out": {"form": "dense", "K": [1,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,1]},
    "xi": {"K": [[1.0, 0.0], [0.0, 1.0]]},
    "xi_out": {"K": [[0.5, 0.0], [0.0, 0.5]]}
  })";
  NetworkPriors priors = priors_from_json(text);
  CHECK(priors.w.form == WeightForm::Iid);
  CHECK(priors.w_in.form == WeightForm::Separable);
  CHECK(priors.w_out.form == WeightForm::Dense);
  CHECK(priors.xi.kernel.at(0, 0) == 1.0);
}

TEST_CASE("malformed JSON raises IoError") {
  CHECK_THROWS_AS(tree_function_from_json("{"), IoError);
  CHECK_THROWS_AS(tree_function_from_json("{\"p\": 2}"), IoError);
}

TEST_CASE("CSV output") {
  TreeFunction f(Prime(2), 1, {1.0, -0.5});
  CHECK(function_csv(f) == "index,value\n0,1\n1,-0.5\n");
  Matrix m(2, 2);
  m.at(0, 0) = 0.25;
  m.at(1, 1) = -1.0;
  CHECK(matrix_csv(m) == "0.25,0\n0,-1\n");
  CHECK(sweep_csv({"a", "b"}, {{1.0, 2.0}}) == "a,b\n1,2\n");
}

TEST_CASE("PGM round trips are bit-exact") {
  GrayImage img{3, 2, {0, 17, 255, 128, 5, 64}};
  for (bool binary : {false, true}) {
    auto path = temp_path(binary ? "t.p5.pgm" : "t.p2.pgm").string();
    write_pgm(path, img, binary);
    GrayImage back = read_pgm(path);
    CHECK(back.width == 3);
    CHECK(back.height == 2);
    CHECK(back.pixels == img.pixels);
    write_pgm(path + ".again", back, binary);
    CHECK(read_file(path) == read_file(path + ".again"));
  }
}

TEST_CASE("PGM rejects bad headers") {
  auto path = temp_path("bad.pgm").string();
  write_file(path, "P3\n1 1\n255\n0\n");
  CHECK_THROWS_AS(read_pgm(path), IoError);
  write_file(path, "P2\n2 2\n65535\n0 0 0 0\n");
  CHECK_THROWS_AS(read_pgm(path), IoError);
  write_file(path, "P5\n4 4\n255\nab");
  CHECK_THROWS_AS(read_pgm(path), IoError);
}

TEST_CASE("PGM comments are skipped") {
  auto path = temp_path("comment.pgm").string();
  write_file(path, "P2\n# a comment\n2 1\n255\n7 9\n");
  GrayImage img = read_pgm(path);
  CHECK(img.pixels == std::vector<std::uint8_t>{7, 9});
}

TEST_CASE("DOT output lists covering edges") {
  Prime p(2);
  ToyParams params{p, 1, 2.0, TreeFunction::zero(p, 1),
                   TreeFunction::zero(p, 1)};
  StatePoset poset = enumerate_states(
      params, DriveField{TreeFunction::zero(p, 1)}, 100);
  std::string dot = poset_dot(poset);
  CHECK(dot.find("digraph hasse") != std::string::npos);
  CHECK(dot.find("->") != std::string::npos);
  // 4 bistable states each cover 4 mid-layer states; 4 mid-layer states are
  // covered by the top: 16 + 4 edges.
  std::size_t edges = 0, pos = 0;
  while ((pos = dot.find("->", pos)) != std::string::npos) {
    ++edges;
    pos += 2;
  }
  CHECK(edges == 20);
}
