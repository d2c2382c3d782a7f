#include "gnm/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/crc.hpp>
#include <json.hpp>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

void put_number(std::string& out, double v)
{
    if (v == 0.0)
        v = 0.0; // "-0" would read back as the integer 0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

template <typename Range>
void put_array(std::string& out, const Range& values)
{
    out += '[';
    bool first = true;
    for (double v : values) {
        if (!first)
            out += ',';
        put_number(out, v);
        first = false;
    }
    out += ']';
}

void put_vector(std::string& out, const Vector& v)
{
    put_array(out, std::vector<double>(v.data(), v.data() + v.size()));
}

/// Every field except the checksum, exactly as written to disk.
std::string canonical_fields(const CheckpointData& d)
{
    std::string out;
    out += "{\"format_version\":" + std::to_string(CheckpointData::format_version) + ",\n";
    out += "\"dim\":" + std::to_string(d.dim) + ",\n";

    out += "\"chain\":[";
    const std::size_t n = static_cast<std::size_t>(d.dim);
    const std::size_t rows = n == 0 ? 0 : d.chain.size() / n;
    for (std::size_t r = 0; r < rows; ++r) {
        out += r == 0 ? "\n" : ",\n";
        put_array(out, std::vector<double>(d.chain.begin() + r * n, d.chain.begin() + (r + 1) * n));
    }
    out += "],\n";

    out += "\"counters\":{\"n_samples\":" + std::to_string(d.n_samples) +
           ",\"n_accepted\":" + std::to_string(d.n_accepted) +
           ",\"call_count\":" + std::to_string(d.call_count) +
           ",\"burned\":" + std::to_string(d.burned) + "},\n";

    out += "\"step_count\":{";
    bool first = true;
    for (const auto& [stage, count] : d.step_count) {
        if (!first)
            out += ',';
        out += "\"" + std::to_string(stage) + "\":" + std::to_string(count);
        first = false;
    }
    out += "},\n";

    out += "\"policy\":{\"mode\":\"" + to_string(d.policy.mode) +
           "\",\"max_steps\":" + std::to_string(d.policy.max_steps) + ",\"factor\":";
    put_number(out, d.policy.factor);
    out += ",\"t_lo\":";
    put_number(out, d.policy.t_lo);
    out += ",\"t_hi\":";
    put_number(out, d.policy.t_hi);
    out += "},\n";

    out += "\"prior\":{\"mean\":";
    put_vector(out, d.prior.mean);
    out += ",\"precision\":";
    // Row-major.
    std::vector<double> h;
    for (Index i = 0; i < d.prior.precision.rows(); ++i)
        for (Index j = 0; j < d.prior.precision.cols(); ++j)
            h.push_back(d.prior.precision(i, j));
    put_array(out, h);
    out += "},\n";

    out += "\"current_x\":";
    put_vector(out, d.current_x);
    out += ",\n";

    out += "\"rng\":{\"algorithm_id\":\"" + d.rng_algorithm + "\",\"state\":[";
    for (std::size_t i = 0; i < d.rng_state.size(); ++i) {
        if (i)
            out += ',';
        out += "\"" + d.rng_state[i] + "\"";
    }
    out += "]}";
    return out;
}

std::string crc_hex(const std::string& text)
{
    boost::crc_32_type crc;
    crc.process_bytes(text.data(), text.size());
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
    return buf;
}

Vector to_vector(const nlohmann::ordered_json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

} // namespace

std::string serialize_checkpoint(const CheckpointData& data)
{
    if (data.dim <= 0 || data.chain.size() % static_cast<std::size_t>(data.dim) != 0)
        throw InvalidArgument("checkpoint chain does not match its dimension");
    const std::string body = canonical_fields(data);
    return body + ",\n\"checksum\":\"" + crc_hex(body) + "\"}\n";
}

CheckpointData parse_checkpoint(const std::string& text)
{
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptCheckpoint(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("format_version"))
        throw CorruptCheckpoint("checkpoint has no format_version");
    if (!doc["format_version"].is_number_integer() ||
        doc["format_version"].get<int>() != CheckpointData::format_version)
        throw CorruptCheckpoint("unsupported checkpoint format_version " +
                                doc["format_version"].dump());

    static const std::vector<std::string> order = {
        "format_version", "dim", "chain", "counters", "step_count", "policy",
        "prior", "current_x", "rng", "checksum"};
    std::vector<std::string> keys;
    for (const auto& item : doc.items())
        keys.push_back(item.key());
    if (keys != order)
        throw CorruptCheckpoint("checkpoint fields are missing or out of order");

    CheckpointData d;
    try {
        d.dim = doc["dim"].get<Index>();
        if (d.dim <= 0)
            throw CorruptCheckpoint("checkpoint dimension must be positive");
        for (const auto& row : doc["chain"]) {
            const auto r = row.get<std::vector<double>>();
            if (static_cast<Index>(r.size()) != d.dim)
                throw CorruptCheckpoint("chain row has the wrong length");
            d.chain.insert(d.chain.end(), r.begin(), r.end());
        }
        const auto& c = doc["counters"];
        d.n_samples = c.at("n_samples").get<std::int64_t>();
        d.n_accepted = c.at("n_accepted").get<std::uint64_t>();
        d.call_count = c.at("call_count").get<std::uint64_t>();
        d.burned = c.at("burned").get<std::int64_t>();
        for (const auto& item : doc["step_count"].items())
            d.step_count[std::stoi(item.key())] = item.value().get<std::uint64_t>();

        const auto& p = doc["policy"];
        d.policy.mode = backoff_mode_from_string(p.at("mode").get<std::string>());
        d.policy.max_steps = p.at("max_steps").get<int>();
        d.policy.factor = p.at("factor").get<double>();
        d.policy.t_lo = p.at("t_lo").get<double>();
        d.policy.t_hi = p.at("t_hi").get<double>();

        d.prior.mean = to_vector(doc["prior"].at("mean"));
        const Vector h = to_vector(doc["prior"].at("precision"));
        if (h.size() != d.dim * d.dim)
            throw CorruptCheckpoint("prior precision has the wrong size");
        d.prior.precision =
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                h.data(), d.dim, d.dim);
        d.current_x = to_vector(doc["current_x"]);

        d.rng_algorithm = doc["rng"].at("algorithm_id").get<std::string>();
        d.rng_state = doc["rng"].at("state").get<std::vector<std::string>>();
    } catch (const CorruptCheckpoint&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptCheckpoint(std::string("checkpoint field has the wrong type: ") + e.what());
    }

    if (!doc["checksum"].is_string() ||
        doc["checksum"].get<std::string>() != crc_hex(canonical_fields(d)))
        throw CorruptCheckpoint("checkpoint checksum mismatch");
    return d;
}

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data)
{
    const std::string text = serialize_checkpoint(data);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw CheckpointWriteFailure("cannot open " + tmp.string() + " for writing");
        os << text;
        os.flush();
        if (!os)
            throw CheckpointWriteFailure("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw CheckpointWriteFailure("cannot move checkpoint into place: " + ec.message());
}

CheckpointData read_checkpoint(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IOFailure("cannot open checkpoint " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad())
        throw IOFailure("failed reading checkpoint " + path.string());
    return parse_checkpoint(ss.str());
}

} // namespace gnm
