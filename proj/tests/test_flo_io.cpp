#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "vfiqa/flo_io.hpp"

#include "oracles.hpp"

using namespace vfiqa;

namespace {

std::string flo_bytes(const MotionField& f) {
    std::ostringstream out;
    write_flo(f, out);
    return out.str();
}

void append_f32(std::string& s, float v) {
    char b[4];
    std::memcpy(b, &v, 4);
    s.append(b, 4);
}

void append_i32(std::string& s, int32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    s.append(b, 4);
}

}  // namespace

TEST_CASE("flo reader decodes a 1x1 field") {
    std::string bytes;
    append_f32(bytes, kFloMagic);
    append_i32(bytes, 1);
    append_i32(bytes, 1);
    append_f32(bytes, 3.0f);
    append_f32(bytes, 4.0f);
    std::istringstream in(bytes);
    FloReadResult r = read_flo(in);
    CHECK(r.field.width == 1);
    CHECK(r.field.height == 1);
    CHECK(r.field.u_at(0, 0) == 3.0);
    CHECK(r.field.v_at(0, 0) == 4.0);
    CHECK(r.replaced_samples == 0);
}

TEST_CASE("flo writer emits the format-mandated sizes") {
    MotionField one(1, 1);
    CHECK(flo_bytes(one).size() == 12 + 8);
    MotionField four(2, 2);
    CHECK(flo_bytes(four).size() == 12 + 32);
}

TEST_CASE("flo rejects a bad magic") {
    std::string bytes;
    append_f32(bytes, 0.0f);
    append_i32(bytes, 1);
    append_i32(bytes, 1);
    std::istringstream in(bytes);
    REQUIRE_THROWS_MATCHES(read_flo(in), IoError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("not a flow file")));
}

TEST_CASE("flo rejects truncation and bad dimensions") {
    std::string good = flo_bytes(oracle::random_float_field(3, 2, 5));
    std::istringstream trunc(good.substr(0, good.size() - 5));
    CHECK_THROWS_AS(read_flo(trunc), IoError);

    std::string bytes;
    append_f32(bytes, kFloMagic);
    append_i32(bytes, -1);
    append_i32(bytes, 4);
    std::istringstream bad_dims(bytes);
    REQUIRE_THROWS_MATCHES(read_flo(bad_dims), IoError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("nonpositive")));
}

TEST_CASE("flo writer refuses non-finite components") {
    MotionField f(2, 1);
    f.u[1] = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream out;
    CHECK_THROWS_AS(write_flo(f, out), std::invalid_argument);
    f.u[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(write_flo(f, out), std::invalid_argument);
}

TEST_CASE("flo sentinel and non-finite payload values are zeroed and counted") {
    std::string bytes;
    append_f32(bytes, kFloMagic);
    append_i32(bytes, 2);
    append_i32(bytes, 1);
    append_f32(bytes, 1e10f);  // unknown-flow convention
    append_f32(bytes, 2.0f);
    append_f32(bytes, std::numeric_limits<float>::quiet_NaN());
    append_f32(bytes, -5.0f);
    std::istringstream in(bytes);
    FloReadResult r = read_flo(in);
    CHECK(r.replaced_samples == 2);
    CHECK(r.field.u_at(0, 0) == 0.0);
    CHECK(r.field.v_at(0, 0) == 2.0);
    CHECK(r.field.u_at(0, 1) == 0.0);
    CHECK(r.field.v_at(0, 1) == -5.0);
    CHECK(r.field.finite());
}

TEST_CASE("flo round-trip is exact for float-valued fields") {
    std::mt19937 rng(13);
    for (int i = 0; i < 50; ++i) {
        const int w = 1 + static_cast<int>(rng() % 9);
        const int h = 1 + static_cast<int>(rng() % 9);
        MotionField f = oracle::random_float_field(w, h, rng());

        std::string bytes = flo_bytes(f);
        std::istringstream in(bytes);
        FloReadResult r = read_flo(in);
        CHECK(r.replaced_samples == 0);
        REQUIRE(r.field.same_shape(f));
        CHECK(r.field.u == f.u);
        CHECK(r.field.v == f.v);

        // byte-level: write(read(bytes)) == bytes
        CHECK(flo_bytes(r.field) == bytes);
    }
}
