#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/crc.hpp>

#include "gnm/checkpoint.hpp"
#include "gnm/errors.hpp"
#include "gnm/rng.hpp"
#include "support.hpp"

using namespace gnm;
namespace fs = std::filesystem;

namespace {

CheckpointData sample_data()
{
    CheckpointData d;
    d.dim = 2;
    d.chain = {0.1, 1.0 / 3.0, -2.5e-300, 4.9e-324, 1e300, -7.0};
    d.n_samples = 3;
    d.n_accepted = 2;
    d.call_count = 9;
    d.burned = 1;
    d.step_count = {{-1, 2}, {1, 1}, {2, 1}, {3, 0}};
    d.policy = BackoffPolicy::fixed(2, 0.1);
    d.prior = GaussianPrior{testsupport::vec({4.0, 2.0}), 0.5 * Matrix::Identity(2, 2)};
    d.current_x = testsupport::vec({1.0 / 7.0, -0.0});
    d.rng_algorithm = Rng::algorithm_id;
    Rng rng(77);
    rng.normals(5);
    d.rng_state = rng.state();
    return d;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to)
{
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

// Recomputes the checksum of an edited document so that only the edit is
// under test.
std::string reseal(const std::string& text)
{
    const std::string key = ",\n\"checksum\":";
    const auto pos = text.rfind(key);
    REQUIRE(pos != std::string::npos);
    const std::string body = text.substr(0, pos);
    boost::crc_32_type crc;
    crc.process_bytes(body.data(), body.size());
    char hex[16];
    std::snprintf(hex, sizeof hex, "%08x", crc.checksum());
    return body + key + "\"" + hex + "\"}";
}

} // namespace

TEST_CASE("round trip is exact")
{
    const CheckpointData d = sample_data();
    const std::string text = serialize_checkpoint(d);
    const CheckpointData e = parse_checkpoint(text);
    CHECK(e.dim == d.dim);
    CHECK(e.chain == d.chain);
    CHECK(e.n_samples == d.n_samples);
    CHECK(e.n_accepted == d.n_accepted);
    CHECK(e.call_count == d.call_count);
    CHECK(e.burned == d.burned);
    CHECK(e.step_count == d.step_count);
    CHECK(e.policy.mode == d.policy.mode);
    CHECK(e.policy.max_steps == d.policy.max_steps);
    CHECK(e.policy.factor == d.policy.factor);
    CHECK(e.prior.mean == d.prior.mean);
    CHECK(e.prior.precision == d.prior.precision);
    CHECK(e.current_x(0) == d.current_x(0));
    CHECK(e.rng_state == d.rng_state);
    CHECK(serialize_checkpoint(e) == text);

    Rng a(77);
    a.normals(5);
    Rng b;
    b.set_state(e.rng_state);
    CHECK(a == b);
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("layout")
{
    const std::string text = serialize_checkpoint(sample_data());
    const char* keys[] = {"\"format_version\":1", "\"dim\":", "\"chain\":", "\"counters\":",
                          "\"step_count\":", "\"policy\":", "\"prior\":", "\"current_x\":",
                          "\"rng\":", "\"checksum\":"};
    std::size_t last = 0;
    for (const char* k : keys) {
        const auto pos = text.find(k);
        REQUIRE(pos != std::string::npos);
        CHECK(pos >= last);
        last = pos;
    }
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("-0,") == std::string::npos);
    CHECK(text.find("\"-1\":2") != std::string::npos);
}

TEST_CASE("corruption is detected")
{
    const std::string text = serialize_checkpoint(sample_data());
    CHECK_THROWS_AS(parse_checkpoint(replace_once(text, "\"call_count\":9", "\"call_count\":8")),
                    CorruptCheckpoint);
    CHECK_THROWS_AS(parse_checkpoint(reseal(replace_once(text, "\"format_version\":1",
                                                         "\"format_version\":2"))),
                    CorruptCheckpoint);
    CHECK_THROWS_AS(parse_checkpoint(text.substr(0, text.size() / 2)), CorruptCheckpoint);
    CHECK_THROWS_AS(parse_checkpoint(""), CorruptCheckpoint);
    CHECK_THROWS_AS(parse_checkpoint("[1,2,3]"), CorruptCheckpoint);
    // A resealed but inconsistent document is still refused.
    CHECK_THROWS_AS(parse_checkpoint(reseal(replace_once(text, "\"dim\":2", "\"dim\":3"))),
                    CorruptCheckpoint);
    CHECK_THROWS_AS(
        parse_checkpoint(reseal(replace_once(text, "\"mode\":\"static\"", "\"mode\":\"wild\""))),
        CorruptCheckpoint);
    CHECK_NOTHROW(parse_checkpoint(reseal(text)));
}

TEST_CASE("files")
{
    const fs::path dir = fs::temp_directory_path() / "gnm_checkpoint_files";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path file = dir / "c.json";
    write_checkpoint(file, sample_data());
    CHECK(fs::exists(file));
    for (const auto& entry : fs::directory_iterator(dir))
        CHECK(entry.path() == file);
    CHECK(read_checkpoint(file).chain == sample_data().chain);

    // Overwrite in place.
    CheckpointData d = sample_data();
    d.call_count = 10;
    write_checkpoint(file, d);
    CHECK(read_checkpoint(file).call_count == 10);

    CHECK_THROWS_AS(read_checkpoint(dir / "none.json"), IOFailure);
    CHECK_THROWS_AS(write_checkpoint(dir / "no" / "such" / "dir.json", d), CheckpointWriteFailure);

    {
        std::ofstream os(dir / "junk.json");
        os << "not json";
    }
    CHECK_THROWS_AS(read_checkpoint(dir / "junk.json"), CorruptCheckpoint);
    fs::remove_all(dir);
}

TEST_CASE("rng state validation")
{
    Rng r;
    CHECK_THROWS_AS(r.set_state({"1", "2"}), InvalidArgument);
    auto words = Rng(3).state();
    words[4] = "12x";
    CHECK_THROWS_AS(r.set_state(words), InvalidArgument);
}
