#include "sounder/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "sounder/version.hpp"

namespace sounder {

namespace {

constexpr char kIqMagic[8] = {'S', 'N', 'D', 'R', 'I', 'Q', '0', '0'};
constexpr std::uint32_t kIqVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u32(out, bits);
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

float get_f32(const unsigned char* p) {
    const std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

void write_file(const std::string& path, const std::string& bytes) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path + " for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed for " + path);
    return bytes;
}

// shortest round-trip formatting; integer-valued cells print without a
// fractional part so tables stay stable and diff-friendly
std::string format_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == std::floor(v) && std::abs(v) < 9.007199254740992e15) {
        const auto as_int = static_cast<long long>(v);
        char buf[24];
        const auto res = std::to_chars(buf, buf + sizeof buf, as_int);
        return std::string(buf, res.ptr);
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

void store_iq(const ComplexSequence& seq, const std::string& path, const IqMetadata& metadata) {
    seq.validate();
    if (!(metadata.sample_rate > 0.0))
        throw ValidationError("store_iq: metadata.sample_rate must be positive");
    std::string bytes;
    bytes.reserve(20 + seq.samples.size() * 8);
    bytes.append(kIqMagic, sizeof kIqMagic);
    put_u32(bytes, kIqVersion);
    put_u64(bytes, static_cast<std::uint64_t>(seq.samples.size()));
    for (const cplx& s : seq.samples) {
        put_f32(bytes, static_cast<float>(s.real()));
        put_f32(bytes, static_cast<float>(s.imag()));
    }
    write_file(path, bytes);

    nlohmann::json side;
    side["sample_rate"] = metadata.sample_rate;
    side["count"] = seq.samples.size();
    if (metadata.center_frequency_hz)
        side["center_frequency_hz"] = *metadata.center_frequency_hz;
    if (metadata.fzc) {
        side["fzc"]["n"] = metadata.fzc->n;
        side["fzc"]["lambda"] = metadata.fzc->lambda;
    }
    if (metadata.periods_k)
        side["periods_k"] = *metadata.periods_k;
    if (metadata.gain_db)
        side["gain_db"] = *metadata.gain_db;
    if (!metadata.notes.empty())
        side["notes"] = metadata.notes;
    if (!metadata.extra.empty())
        side["extra"] = metadata.extra;
    write_file(path + ".json", side.dump(2) + "\n");
}

Capture load_iq(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 20)
        throw FormatError("load_iq: " + path + " is too short to hold a header");
    if (std::memcmp(bytes.data(), kIqMagic, sizeof kIqMagic) != 0)
        throw FormatError("load_iq: " + path + " has an unrecognized magic");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t version = get_u32(p + 8);
    if (version != kIqVersion)
        throw FormatError("load_iq: unsupported version " + std::to_string(version) +
                          " (expected " + std::to_string(kIqVersion) + ")");
    const std::uint64_t count = get_u64(p + 12);
    const std::uint64_t payload = bytes.size() - 20;
    if (payload != count * 8)
        throw FormatError("load_iq: expected " + std::to_string(count) + " samples, payload holds " +
                          std::to_string(payload / 8));

    nlohmann::json side;
    try {
        side = nlohmann::json::parse(read_file(path + ".json"));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("load_iq: sidecar " + path + ".json is not valid JSON: " + e.what());
    }
    if (!side.contains("sample_rate"))
        throw ValidationError("load_iq: sidecar " + path + ".json lacks sample_rate");
    if (side.contains("count") && side["count"].get<std::uint64_t>() != count)
        throw MetadataMismatch("load_iq: sidecar count " +
                               std::to_string(side["count"].get<std::uint64_t>()) +
                               " disagrees with payload count " + std::to_string(count));

    Capture capture;
    capture.samples.sample_rate = side["sample_rate"].get<double>();
    capture.samples.samples.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const unsigned char* s = p + 20 + i * 8;
        capture.samples.samples[i] = cplx(get_f32(s), get_f32(s + 4));
    }
    capture.periods_k = side.contains("periods_k") ? side["periods_k"].get<int>() : 1;
    if (capture.periods_k < 1)
        throw ValidationError("load_iq: sidecar periods_k must be >= 1");
    if (side.contains("fzc")) {
        capture.spec.n = side["fzc"]["n"].get<std::int64_t>();
        capture.spec.lambda = side["fzc"]["lambda"].get<std::int64_t>();
    } else {
        if (count % static_cast<std::uint64_t>(capture.periods_k) != 0)
            throw MetadataMismatch("load_iq: payload count " + std::to_string(count) +
                                   " is not a multiple of periods_k " +
                                   std::to_string(capture.periods_k));
        capture.spec.n = static_cast<std::int64_t>(count) / capture.periods_k;
        capture.spec.lambda = 1;
    }
    if (static_cast<std::uint64_t>(capture.spec.n) *
            static_cast<std::uint64_t>(capture.periods_k) != count)
        throw MetadataMismatch("load_iq: sidecar declares N=" + std::to_string(capture.spec.n) +
                               ", K=" + std::to_string(capture.periods_k) + " but payload holds " +
                               std::to_string(count) + " samples");
    if (side.contains("center_frequency_hz"))
        capture.metadata["center_frequency_hz"] =
            format_number(side["center_frequency_hz"].get<double>());
    if (side.contains("gain_db"))
        capture.metadata["gain_db"] = format_number(side["gain_db"].get<double>());
    if (side.contains("notes"))
        capture.metadata["notes"] = side["notes"].get<std::string>();
    if (side.contains("extra"))
        for (const auto& [key, value] : side["extra"].items())
            capture.metadata[key] = value.get<std::string>();
    capture.validate();
    return capture;
}

std::string render_results(const SweepResultTable& table, ResultFormat format) {
    if (table.rows.empty())
        throw EmptyResult("render_results: table has no rows");
    if (table.columns.empty())
        throw EmptyResult("render_results: table has no columns");
    for (const auto& row : table.rows)
        if (row.size() != table.columns.size())
            throw ValidationError("render_results: row width disagrees with column count");

    if (format == ResultFormat::Json) {
        nlohmann::json doc;
        for (const auto& [key, value] : table.metadata)
            if (key != "timestamp")
                doc["metadata"][key] = value;
        doc["columns"] = table.columns;
        auto& rows = doc["rows"] = nlohmann::json::array();
        for (const auto& row : table.rows)
            rows.push_back(row);
        return doc.dump(2) + "\n";
    }

    std::string out;
    for (const auto& [key, value] : table.metadata)
        if (key != "timestamp")
            out += "# " + key + "=" + value + "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c)
            out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

void emit_results(const SweepResultTable& table, ResultFormat format, const std::string& path) {
    write_file(path, render_results(table, format));
}

void export_cir_csv(const CirEstimate& cir, const std::string& path) {
    if (cir.taps.empty())
        throw EmptyResult("export_cir_csv: CIR has no taps");
    std::string out = "delay_s,magnitude_db,phase_rad\n";
    for (std::size_t i = 0; i < cir.taps.size(); ++i) {
        out += format_number(static_cast<double>(i) * cir.delay_step_s);
        out += ',';
        out += format_number(linear_amp_to_db(std::abs(cir.taps[i])));
        out += ',';
        out += format_number(std::arg(cir.taps[i]));
        out += '\n';
    }
    write_file(path, out);
}

void store_cir(const CirEstimate& cir, const std::string& path) {
    if (cir.taps.empty())
        throw EmptyResult("store_cir: CIR has no taps");
    ComplexSequence seq;
    seq.samples = cir.taps;
    seq.sample_rate = cir.delay_step_s > 0.0 ? 1.0 / cir.delay_step_s : 1.0;
    IqMetadata meta;
    meta.sample_rate = seq.sample_rate;
    meta.notes = "CIR estimate";
    meta.extra = cir.provenance;
    meta.extra["tool_version"] = kToolVersion;
    store_iq(seq, path, meta);
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty())
        throw ValidationError("resolve_output_path: empty path");
    const std::filesystem::path p(path);
    if (p.is_absolute())
        return path;
    const char* dir = std::getenv("SOUNDER_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0')
        return path;
    return (std::filesystem::path(dir) / p).string();
}

} // namespace sounder
