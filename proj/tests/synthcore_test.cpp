#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/image.hpp"
#include "fpsynth/manifest.hpp"
#include "fpsynth/png_io.hpp"
#include "fpsynth/rng.hpp"

using namespace fpsynth;

TEST_SUITE_BEGIN("synthcore");

TEST_CASE("finger class mapping is total and bijective") {
  CHECK(FingerClass(1).name() == "Left-Index");
  CHECK(FingerClass(5).name() == "Left-Thumb");
  CHECK(FingerClass(6).name() == "Right-Index");
  CHECK(FingerClass(10).name() == "Right-Thumb");
  std::set<std::string_view> names;
  for (int i = 1; i <= 10; ++i) names.insert(FingerClass(i).name());
  CHECK(names.size() == 10);
  CHECK_THROWS_AS(FingerClass(0), std::out_of_range);
  CHECK_THROWS_AS(FingerClass(11), std::out_of_range);
}

TEST_CASE("material round-trips through its canonical string") {
  CHECK(kAllMaterials.size() == 9);
  CHECK(kSpoofMaterials.size() == 8);
  for (Material m : kAllMaterials) {
    const auto back = material_from_string(to_string(m));
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
  CHECK(!material_from_string("Playdough").has_value());
}

TEST_CASE("identical derivations give identical streams") {
  RngStream a = derive_rng(7, 0, FingerClass(1), 1);
  RngStream b = derive_rng(7, 0, FingerClass(1), 1);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct tuples give distinct streams") {
  // oracle: draw both sequences and compare positionwise
  RngStream a = derive_rng(7, 0, FingerClass(1), 1);
  RngStream b = derive_rng(7, 0, FingerClass(1), 2);
  int differing = 0;
  for (int i = 0; i < 16; ++i) differing += a.next_u64() != b.next_u64();
  CHECK(differing >= 1);

  // every field matters
  const uint64_t base = derive_rng(7, 1, FingerClass(3), 2).next_u64();
  CHECK(base != derive_rng(8, 1, FingerClass(3), 2).next_u64());
  CHECK(base != derive_rng(7, 2, FingerClass(3), 2).next_u64());
  CHECK(base != derive_rng(7, 1, FingerClass(4), 2).next_u64());
  CHECK(base != derive_rng(7, 1, FingerClass(3), 3).next_u64());
}

TEST_CASE("derivation is pure: order of use cannot matter") {
  // draw tuple streams in two different orders and compare outputs
  std::vector<uint64_t> serial, shuffled;
  for (int imp = 1; imp <= 3; ++imp) {
    RngStream s = derive_rng(7, 1, FingerClass(3), static_cast<uint64_t>(imp));
    serial.push_back(s.next_u64());
  }
  for (int imp = 3; imp >= 1; --imp) {
    RngStream s = derive_rng(7, 1, FingerClass(3), static_cast<uint64_t>(imp));
    shuffled.push_back(s.next_u64());
  }
  CHECK(serial[0] == shuffled[2]);
  CHECK(serial[1] == shuffled[1]);
  CHECK(serial[2] == shuffled[0]);
}

TEST_CASE("fork is independent of draw position") {
  RngStream a(123);
  RngStream b(123);
  b.next_u64();
  b.next_u64();
  CHECK(a.fork(9).next_u64() == b.fork(9).next_u64());
  CHECK(a.fork(9).next_u64() != a.fork(10).next_u64());
}

TEST_CASE("uniform draws respect their ranges") {
  RngStream rng(99);
  double mean = 0.0;
  constexpr int kN = 10000;
  for (int i = 0; i < kN; ++i) {
    const double v = rng.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
    mean += v;
  }
  mean /= kN;
  CHECK(std::abs(mean - 1.0) < 0.1);

  for (int i = 0; i < 1000; ++i) {
    const int64_t v = rng.uniform_int(2, 5);
    CHECK(v >= 2);
    CHECK(v <= 5);
  }
}

TEST_CASE("normal draws have roughly the right moments") {
  RngStream rng(7);
  constexpr int kN = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double v = rng.normal(10.0, 3.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / kN;
  const double stddev = std::sqrt(sq / kN - mean * mean);
  CHECK(std::abs(mean - 10.0) < 0.1);
  CHECK(std::abs(stddev - 3.0) < 0.1);
}

TEST_CASE("bilinear sampling is exact at integer coordinates") {
  GrayImage img(8, 8, 200);
  img.at(3, 4) = 17;
  CHECK(img.sample_bilinear(3.0, 4.0) == doctest::Approx(17.0));
  CHECK(img.sample_bilinear(3.5, 4.0) == doctest::Approx((17.0 + 200.0) / 2));
  CHECK(img.sample_bilinear(-5.0, -5.0) == doctest::Approx(255.0));
}

TEST_CASE("png round-trips an arbitrary grayscale image") {
  RngStream rng(5);
  GrayImage img(kImageSize, kImageSize);
  for (auto& p : img.pixels()) p = static_cast<uint8_t>(rng.uniform_int(0, 255));

  const auto bytes = encode_png_gray8(img);
  const GrayImage back = decode_png_gray8(bytes);
  CHECK(back == img);
}

TEST_CASE("png encoding is byte-stable") {
  GrayImage img(64, 64, 128);
  img.at(10, 10) = 3;
  CHECK(encode_png_gray8(img) == encode_png_gray8(img));
}

TEST_CASE("png decoder rejects non-png bytes") {
  std::vector<uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_WITH_AS(decode_png_gray8(junk), doctest::Contains("not a PNG"),
                       std::runtime_error);
}

namespace {

DatasetManifest db2_shaped_manifest() {
  // 50 subjects x 10 classes x 3 impressions, Live
  DatasetManifest m;
  for (int cls = 1; cls <= 10; ++cls) {
    for (int64_t subject = 0; subject < 50; ++subject) {
      for (int imp = 1; imp <= 3; ++imp) {
        ManifestRecord r;
        r.subject = subject;
        r.finger_class = FingerClass(cls);
        r.impression = imp;
        r.material = Material::Live;
        r.path = "Live/" + std::to_string(cls) + "/" + std::to_string(subject) + "_" +
                 std::to_string(imp) + ".png";
        m.records.push_back(r);
      }
    }
  }
  return m;
}

}  // namespace

TEST_CASE("empty manifest round-trips") {
  DatasetManifest empty;
  std::stringstream ss;
  write_manifest(empty, ss);
  CHECK(ss.str().empty());
  CHECK(read_manifest(ss).records.empty());
}

TEST_CASE("a DB2-shaped manifest of 1500 records round-trips") {
  const DatasetManifest m = db2_shaped_manifest();
  REQUIRE(m.records.size() == 1500);
  std::stringstream ss;
  write_manifest(m, ss);
  const DatasetManifest back = read_manifest(ss);
  CHECK(back.records.size() == 1500);
  CHECK(back == m);
}

TEST_CASE("manifest parse errors name the offending record") {
  std::stringstream ss;
  ss << R"({"path":"a.png","subject":0,"class":1,"impression":1,"material":"Live"})" << "\n";
  ss << "{broken json\n";
  CHECK_THROWS_WITH_AS(read_manifest(ss), doctest::Contains("record 2"), std::runtime_error);
}

TEST_CASE("out-of-range class is a validation error") {
  std::stringstream ss;
  ss << R"({"path":"a.png","subject":0,"class":11,"impression":1,"material":"Live"})" << "\n";
  CHECK_THROWS_WITH_AS(read_manifest(ss), doctest::Contains("record 1"), std::runtime_error);
}

TEST_CASE("unknown material is a validation error") {
  std::stringstream ss;
  ss << R"({"path":"a.png","subject":0,"class":1,"impression":1,"material":"Butter"})" << "\n";
  CHECK_THROWS_WITH_AS(read_manifest(ss), doctest::Contains("Butter"), std::runtime_error);
}

TEST_CASE("duplicate key tuple is a validation error") {
  DatasetManifest m;
  ManifestRecord r;
  r.path = "a.png";
  m.records.push_back(r);
  r.path = "b.png";  // same (subject, class, impression, material)
  m.records.push_back(r);
  CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("duplicate"), std::invalid_argument);
}

TEST_CASE("erode keeps only deep interior") {
  Bitmap m(32, 32);
  for (int y = 8; y < 24; ++y) {
    for (int x = 8; x < 24; ++x) m.at(x, y) = 1;
  }
  const Bitmap inner = erode(m, 4.0);
  CHECK(inner.count() > 0);
  CHECK(inner.count() < m.count());
  CHECK(!inner.test(8, 8));
  CHECK(inner.test(15, 15));
}

TEST_SUITE_END();
