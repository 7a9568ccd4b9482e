#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "forge/core/error.hpp"
#include "forge/core/sampling.hpp"
#include "forge/io/document.hpp"
#include "forge/io/files.hpp"
#include "forge/io/mesh_io.hpp"
#include "forge/io/payload.hpp"
#include "forge/io/sidecar.hpp"
#include "forge/io/stats.hpp"
#include "oracles.hpp"

using namespace forge;
using namespace forge::io;
namespace fs = std::filesystem;

#ifndef FORGE_FIXTURE_DIR
#define FORGE_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

const TemplateRegistry& reg() {
  static const TemplateRegistry r = builtin_registry();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("forge_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kIo;
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an Error");
  return {};
}

// Three levels: mug / coaster / felt pad, plus a sibling legged base.
Conceptualization nested_document() {
  Conceptualization c;
  c.object_id = "mug_0042";
  c.source_mesh = "meshes/mug_0042.obj";
  c.category = {"Mug", "Mug"};
  ConceptInstance mug = default_instance(reg(), "mug");
  mug.continuous = {0.05, 0.11, 0.031, 0.0065};
  mug.pose.rotation = Quaternion::from_axis_angle({0, 1, 0}, 0.3);
  mug.pose.translation = {0.1, 0.2, -0.3};
  ConceptInstance coaster = default_instance(reg(), "cylinder");
  coaster.continuous = {0.07, 0.005};
  coaster.pose.translation = {0, -0.06, 0};
  ConceptInstance pad = default_instance(reg(), "cuboid");
  pad.continuous = {0.02, 0.001, 0.02};
  pad.pose.translation = {0.01, -0.003, 1.0 / 3.0};
  ConceptInstance base = default_instance(reg(), "legged_base");
  base.discrete = {5};
  c.parts = {{"mug", mug, {{"coaster", coaster, {{"pad", pad, {}}}}}}, {"stand", base, {}}};
  return c;
}

void check_golden(const std::string& name, const std::string& bytes) {
  const fs::path p = fs::path(FORGE_FIXTURE_DIR) / "golden" / name;
  if (std::getenv("FORGE_UPDATE_GOLDEN")) write_file_atomic(p, bytes);
  REQUIRE(fs::exists(p));
  CHECK(read_file(p) == bytes);
}

}  // namespace

TEST_SUITE("mesh files") {
  TEST_CASE("minimal OBJ") {
    const TriMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK(m.vertex_count() == 3);
    REQUIRE(m.face_count() == 1);
    CHECK(m.faces[0] == Face{0, 1, 2});
  }

  TEST_CASE("quad fan triangulation, slash forms and negative indices") {
    const TriMesh m = parse_obj(
        "# comment\no quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\n"
        "f 1/1/1 2//1 3/1 4\nf -4 -3 -2\n");
    REQUIRE(m.face_count() == 3);
    CHECK(m.faces[0] == Face{0, 1, 2});
    CHECK(m.faces[1] == Face{0, 2, 3});
    CHECK(m.faces[2] == Face{0, 1, 2});
  }

  TEST_CASE("OBJ errors name the line") {
    CHECK(message_of([] { parse_obj("v 0 0 0\nv 1 0 0\nf 1 2\n"); }).find("line 3") != std::string::npos);
    CHECK(message_of([] { parse_obj("v 0 0 0\nv 1 x 0\n"); }).find("line 2") != std::string::npos);
    CHECK(message_of([] { parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 5\n"); }).find("line 4") != std::string::npos);
    // repeated vertex: the fan would produce a zero-area triangle
    CHECK(message_of([] { parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 2 3\n"); }).find("line 4") !=
          std::string::npos);
    CHECK(kind_of([] { parse_obj("bogus 1 2\n"); }) == ErrorKind::kInvalidArgument);
  }

  TEST_CASE("ASCII PLY, binary rejected") {
    const std::string ply =
        "ply\nformat ascii 1.0\ncomment x\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n"
        "property uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n"
        "0 0 0 1\n1 0 0 1\n1 1 0 1\n0 1 0 1\n4 0 1 2 3\n";
    const TriMesh m = parse_ply(ply);
    CHECK(m.vertex_count() == 4);
    CHECK(m.face_count() == 2);
    CHECK(m.vertices[2] == Vec3{1, 1, 0});
    CHECK(kind_of([] { parse_ply("ply\nformat binary_little_endian 1.0\nend_header\n"); }) ==
          ErrorKind::kInvalidArgument);
    CHECK(message_of([&] { parse_ply(ply.substr(0, ply.size() - 10)); }).find("line") != std::string::npos);
  }

  TEST_CASE("save/load round trip keeps 9 significant digits") {
    TempDir dir;
    const TriMesh src = instantiate_concept(reg(), nested_document().parts[0].instance, 12).merged;
    for (const char* name : {"m.obj", "m.ply"}) {
      save_mesh(dir.path / name, src);
      const TriMesh back = load_mesh(dir.path / name);
      REQUIRE(back.vertex_count() == src.vertex_count());
      CHECK(back.faces == src.faces);
      double worst = 0;
      for (std::size_t i = 0; i < src.vertex_count(); ++i) {
        for (int a = 0; a < 3; ++a) {
          worst = std::max(worst, std::abs(back.vertices[i][a] - src.vertices[i][a]) /
                                      std::max(std::abs(src.vertices[i][a]), 1e-300));
        }
      }
      CHECK(worst <= 5e-9);
    }
    // no temporary files left behind
    CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator()) == 2);
  }

  TEST_CASE("point cloud loading and unknown extensions") {
    TempDir dir;
    PointCloud pc;
    pc.points = {{0, 0, 0}, {1, 2, 3}, {-1, 0.5, 0.25}};
    save_points(dir.path / "p.ply", pc);
    CHECK(load_points(dir.path / "p.ply").points == pc.points);
    CHECK(kind_of([&] { load_mesh(dir.path / "p.stl"); }) == ErrorKind::kInvalidArgument);
    CHECK(kind_of([&] { load_mesh(dir.path / "missing.obj"); }) == ErrorKind::kNotFound);
  }
}

TEST_SUITE("documents") {
  TEST_CASE("nested document round-trips byte-identically") {
    const Conceptualization c = nested_document();
    const std::string a = serialize_document(reg(), c);
    const Conceptualization back = parse_document(reg(), a);
    CHECK(back == c);
    CHECK(serialize_document(reg(), back) == a);
    check_golden("mug_document.json", a);
  }

  TEST_CASE("random documents round-trip") {
    std::mt19937_64 rng(7);
    const auto ids = reg().ids();
    for (int trial = 0; trial < 30; ++trial) {
      Conceptualization c;
      c.object_id = "obj" + std::to_string(trial);
      c.category = {"Tab", "Table"};
      for (int k = 0; k < 3; ++k) {
        ConceptPart p{"p" + std::to_string(k), testing::random_instance(reg(), ids[rng() % ids.size()], rng()), {}};
        p.children.push_back({"child", testing::random_instance(reg(), ids[rng() % ids.size()], rng()), {}});
        c.parts.push_back(p);
      }
      const std::string s = serialize_document(reg(), c);
      CHECK(parse_document(reg(), s) == c);
      CHECK(serialize_document(reg(), parse_document(reg(), s)) == s);
    }
  }

  TEST_CASE("strict schema") {
    const std::string good = serialize_document(reg(), nested_document());
    Json j = parse_json(good);

    Json empty = j;
    empty["parts"] = Json::array();
    CHECK(message_of([&] { parse_document(reg(), empty.dump()); }).find("at least 1 part required") !=
          std::string::npos);
    Conceptualization none = nested_document();
    none.parts.clear();
    CHECK(kind_of([&] { serialize_document(reg(), none); }) == ErrorKind::kSchema);

    Json extra = j;
    extra["parts"][0]["children"][0]["colour"] = "red";
    CHECK(message_of([&] { parse_document(reg(), extra.dump()); }) ==
          "$.parts[0].children[0]: unknown field 'colour'");

    Json unknown = j;
    unknown["parts"][1]["template_id"] = "hovercraft";
    const std::string msg = message_of([&] { parse_document(reg(), unknown.dump()); });
    CHECK(msg.find("hovercraft") != std::string::npos);
    CHECK(kind_of([&] { parse_document(reg(), unknown.dump()); }) == ErrorKind::kNotFound);

    Json missing = j;
    missing["parts"][0]["continuous_params"].erase("body_radius");
    CHECK(message_of([&] { parse_document(reg(), missing.dump()); }) ==
          "$.parts[0].continuous_params: missing parameter 'body_radius'");

    Json version = j;
    version["schema_version"] = 2;
    CHECK(kind_of([&] { parse_document(reg(), version.dump()); }) == ErrorKind::kSchema);

    Json oob = j;
    oob["parts"][0]["continuous_params"]["body_radius"] = 5.0;
    CHECK(kind_of([&] { parse_document(reg(), oob.dump()); }) == ErrorKind::kOutOfBounds);

    Json dup = j;
    dup["parts"][1]["part_name"] = "mug";
    CHECK(kind_of([&] { parse_document(reg(), dup.dump()); }) == ErrorKind::kSchema);

    CHECK(kind_of([&] { parse_document(reg(), "{\"parts\": ["); }) == ErrorKind::kSchema);
  }

  TEST_CASE("category registry") {
    CategoryRegistry cats = builtin_categories();
    CHECK(cats.contains("Mug"));
    CHECK(cats.contains("USB"));
    CHECK(cats.name("Ktp") == "KitchenPot");
    CHECK(kind_of([&] { cats.add({"Mug", "Cup"}); }) == ErrorKind::kConflict);
    CHECK(kind_of([&] { cats.add({"Mugs", "Cup"}); }) == ErrorKind::kInvalidArgument);

    Conceptualization c = nested_document();
    c.category = {"Hdl", "Handle"};
    const std::string s = serialize_document(reg(), c);
    CHECK(kind_of([&] { parse_document(reg(), s, &cats); }) == ErrorKind::kSchema);
    cats.add({"Hdl", "Handle"});
    CHECK(parse_document(reg(), s, &cats) == c);
  }

  TEST_CASE("atomic save replaces the file") {
    TempDir dir;
    const fs::path p = dir.path / "doc.json";
    save_document(reg(), p, nested_document());
    Conceptualization c = nested_document();
    c.object_id = "renamed";
    save_document(reg(), p, c);
    CHECK(load_document(reg(), p).object_id == "renamed");
    CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator()) == 1);
  }
}

TEST_SUITE("sidecar") {
  TEST_CASE("round trip is exact") {
    const Conceptualization c = nested_document();
    const TriMesh target = apply_transform(instantiate_concept(reg(), c.parts[0].instance, 16).merged,
                                           RigidTransform::from_translation({0.001, 0, 0}));
    const PointCloud pts = sample_surface(target, 300, 5);
    const CorrespondenceMap map = build_correspondence(reg(), pts, c, 16);
    const std::string bytes = encode_sidecar(map);
    const CorrespondenceMap back = decode_sidecar(bytes);
    CHECK(back == map);
    CHECK(encode_sidecar(back) == bytes);

    std::size_t header = 4 + 4 + 4 + 4 + 8;
    for (const auto& p : map.parts) header += 4 + p.path.size() + 4 + p.template_id.size() + 4;
    CHECK(bytes.size() == header + map.entries.size() * kSidecarRecordSize);

    CHECK(kind_of([&] { decode_sidecar(bytes.substr(0, bytes.size() - 1)); }) == ErrorKind::kSchema);
    CHECK(kind_of([&] { decode_sidecar("XXXX" + bytes.substr(4)); }) == ErrorKind::kSchema);
    CHECK(kind_of([&] { decode_sidecar(bytes + "x"); }) == ErrorKind::kSchema);

    CorrespondenceMap bad = map;
    bad.entries[0].face = map.parts[bad.entries[0].part].face_count;
    CHECK(kind_of([&] { decode_sidecar(encode_sidecar(bad)); }) == ErrorKind::kSchema);
  }

  TEST_CASE("little-endian layout golden") {
    CorrespondenceMap map;
    map.resolution = 8;
    map.parts = {{"lid", "flat_lid", 12}};
    map.entries = {{0, 3, {0.25, 0.5, 0.25}, {1, -2, 0.5}, {0, 0, 1e-3}, 1e-3}};
    const std::string bytes = encode_sidecar(map);
    CHECK(bytes.substr(0, 4) == "CFCM");
    CHECK(static_cast<unsigned char>(bytes[8]) == 8);  // resolution, low byte first
    check_golden("small.cfcm", bytes);
    CHECK(decode_sidecar(bytes) == map);
  }
}

TEST_SUITE("stats") {
  TEST_CASE("lower median") {
    CHECK(lower_median({}) == 0);
    CHECK(lower_median({4}) == 4);
    CHECK(lower_median({3, 1}) == 1);
    CHECK(lower_median({5, 1, 3, 9}) == 3);
    CHECK(lower_median({5, 1, 3}) == 3);
  }

  TEST_CASE("single object") {
    Conceptualization c;
    c.object_id = "one";
    c.category = {"Bkt", "Bucket"};
    // 5 leaves: cylinder + u_handle (3) + sphere; parameters 9 + 10 + 11 = 30
    c.parts = {{"body", default_instance(reg(), "cylinder"), {}},
               {"handle", default_instance(reg(), "u_handle"), {}},
               {"cap", default_instance(reg(), "sphere"), {}}};
    const ObjectCounts k = count_object(reg(), c);
    CHECK(k.instances == 5);
    CHECK(k.parameters == 30);
    const AssetStats s = aggregate_stats({{c.category, k}});
    REQUIRE(s.categories.size() == 1);
    CHECK(s.categories[0] == CategoryStats{"Bkt", "Bucket", 1, 5, 5, 5, 30, 30, 30});
  }

  TEST_CASE("hand-computed corpus") {
    TempDir dir;
    for (const auto& d : testing::stats_corpus(reg())) {
      fs::create_directories((dir.path / d.file).parent_path());
      save_document(reg(), dir.path / d.file, d.document);
    }
    std::ofstream(dir.path / "broken.json") << "{\"schema_version\": 1";
    std::ofstream(dir.path / "notes.txt") << "ignored";
    const AssetStats s = compute_stats(reg(), dir.path);
    AssetStats expected = testing::expected_corpus_stats();
    expected.skipped = {{"broken.json", "invalid JSON at byte 21"}};
    CHECK(s == expected);

    std::size_t i_sum = 0, p_sum = 0;
    for (const auto& c : s.categories) {
      i_sum += c.i_ttl;
      p_sum += c.p_ttl;
      CHECK(c.i_med <= c.i_max);
      CHECK(c.p_med <= c.p_max);
    }
    CHECK(i_sum == s.i_ttl);
    CHECK(p_sum == s.p_ttl);

    const std::string table = format_stats_table(s);
    CHECK(table.rfind("       Bot  Ktp  Mug  Tab  TTL\n", 0) == 0);
    CHECK(table.find("\nI_med  1    9    2    6    -\n") != std::string::npos);
    CHECK(table.find("\nP_ttl  11   41   61   69   182\n") != std::string::npos);
    check_golden("corpus_stats.txt", table);

    CHECK(stats_from_json(JsonReader(parse_json(canonical_dump(stats_to_json(s))))) == s);
  }

  TEST_CASE("permutation invariance") {
    std::vector<std::pair<Category, ObjectCounts>> objects;
    for (const auto& d : testing::stats_corpus(reg())) objects.emplace_back(d.document.category, count_object(reg(), d.document));
    const AssetStats base = aggregate_stats(objects);
    std::mt19937 rng(3);
    for (int k = 0; k < 10; ++k) {
      std::shuffle(objects.begin(), objects.end(), rng);
      CHECK(aggregate_stats(objects) == base);
    }
  }

  TEST_CASE("empty and missing directories") {
    TempDir dir;
    const AssetStats s = compute_stats(reg(), dir.path);
    CHECK(s.categories.empty());
    CHECK(s.n == 0);
    CHECK(s.i_ttl == 0);
    CHECK(format_stats_table(s).find("N      0") != std::string::npos);
    CHECK(kind_of([&] { compute_stats(reg(), dir.path / "nope"); }) == ErrorKind::kNotFound);
  }
}

TEST_SUITE("payloads") {
  TEST_CASE("instance JSON round trip and partial requests") {
    const ConceptInstance inst = nested_document().parts[1].instance;
    const Json j = instance_to_json(reg(), inst);
    CHECK(instance_from_json(reg(), JsonReader(j)) == inst);

    const Json partial = parse_json(R"({"template_id": "cylinder", "continuous_params": {"radius": 0.2}})");
    const ConceptInstance p = instance_from_json(reg(), JsonReader(partial), true);
    CHECK(p.continuous == std::vector<double>{0.2, reg().default_params("cylinder")[1]});
    CHECK(p.pose == RigidTransform::identity());
    CHECK(kind_of([&] { instance_from_json(reg(), JsonReader(partial)); }) == ErrorKind::kSchema);
    const Json bad = parse_json(R"({"template_id": "cylinder", "continuous_params": {"radios": 0.2}})");
    CHECK(message_of([&] { instance_from_json(reg(), JsonReader(bad), true); }) ==
          "$.continuous_params: unknown parameter 'radios' for template 'cylinder'");
  }

  TEST_CASE("mesh payload is flat") {
    const TriMesh m = make_box({1, 2, 3});
    const Json j = mesh_to_json(m);
    CHECK(j["vertices"].size() == 24);
    CHECK(j["faces"].size() == 36);
    CHECK(j["vertex_count"] == 8);
    CHECK(j["vertices"][4] == m.vertices[1].y);
  }

  TEST_CASE("region table") {
    AnnotationSet a;
    a.point_labels = {{"body"}, {}, {"handle", "pull"}};
    CHECK(region_table(a) == "index\tlabels\n0\tbody\n1\t-\n2\thandle,pull\n");
  }

  TEST_CASE("canonical dump") {
    Json j = {{"b", 0.1}, {"a", 1.0 / 3.0}, {"c", 1e-300}};
    const std::string s = canonical_dump(j);
    CHECK(s == "{\n  \"a\": 0.3333333333333333,\n  \"b\": 0.1,\n  \"c\": 1e-300\n}\n");
    CHECK(kind_of([] { canonical_dump(Json{{"x", std::nan("")}}); }) == ErrorKind::kNumeric);
  }

  TEST_CASE("template catalog") {
    const KnowledgeRegistry kn = builtin_knowledge(reg());
    const Json cat = template_catalog(reg(), kn);
    CHECK(cat.size() == reg().ids().size());
    CHECK(cat.size() >= 22);
    for (const auto& d : cat) {
      for (const auto& p : d["params"]) {
        CHECK(p["lower"].get<double>() <= p["default"].get<double>());
        CHECK(p["default"].get<double>() <= p["upper"].get<double>());
      }
    }
    const Json mug = template_descriptor(reg(), kn, "mug");
    CHECK(mug["kind"] == "concept");
    CHECK(mug["members"].size() == 2);
    CHECK(mug["regions"].size() >= 1);
  }
}
