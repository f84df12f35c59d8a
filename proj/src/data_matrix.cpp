#include "onebatch/data_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "onebatch/error.hpp"

namespace onebatch {

std::mt19937_64 make_rng(RandomSeed seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed.value),
                      static_cast<std::uint32_t>(seed.value >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

DataMatrix::DataMatrix(std::size_t n, std::size_t p, std::vector<double> values)
    : n_(n), p_(p), values_(std::move(values)) {
    if (n_ == 0) throw EmptyDataset("data matrix has no rows");
    if (p_ == 0) throw InvalidSpec("data matrix has no columns");
    if (values_.size() != n_ * p_)
        throw DimensionMismatch("expected " + std::to_string(n_ * p_) + " values, got " +
                                std::to_string(values_.size()));
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (!std::isfinite(values_[idx]))
            throw NonFinite("non-finite value at row " + std::to_string(idx / p_) + ", column " +
                            std::to_string(idx % p_));
    }
}

DataMatrix DataMatrix::select_rows(std::span<const std::size_t> rows) const {
    std::vector<double> out;
    out.reserve(rows.size() * p_);
    for (std::size_t r : rows) {
        if (r >= n_) throw IndexOutOfRange("row " + std::to_string(r) + " out of range");
        auto src = row(r);
        out.insert(out.end(), src.begin(), src.end());
    }
    return DataMatrix(rows.size(), p_, std::move(out));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

}  // namespace

DataMatrix parse_csv(const std::string& text, const CsvOptions& options) {
    std::vector<double> values;
    std::size_t width = 0;  // raw column count, fixed by the first data row
    std::size_t kept = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    std::vector<bool> dropped;

    std::string_view rest(text);
    while (!rest.empty()) {
        std::size_t eol = rest.find('\n');
        std::string_view line = rest.substr(0, eol);
        rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
        ++line_no;
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }

        auto fields = split_fields(line);
        if (rows == 0) {
            width = fields.size();
            dropped.assign(width, false);
            for (std::size_t c : options.drop_columns) {
                if (c >= width)
                    throw ParseError("dropped column index " + std::to_string(c) + " exceeds row width " +
                                         std::to_string(width),
                                     line_no, 0);
                dropped[c] = true;
            }
            kept = static_cast<std::size_t>(std::count(dropped.begin(), dropped.end(), false));
            if (kept == 0) throw ParseError("no columns left after dropping", line_no, 0);
        } else if (fields.size() != width) {
            throw ParseError("ragged row: expected " + std::to_string(width) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no, 0);
        }

        for (std::size_t c = 0; c < width; ++c) {
            if (dropped[c]) continue;
            std::string_view f = fields[c];
            if (!f.empty() && f.front() == '+') f.remove_prefix(1);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size())
                throw ParseError("cannot parse '" + std::string(fields[c]) + "' as a number", line_no, c + 1);
            if (!std::isfinite(v))
                throw ParseError("non-finite value '" + std::string(fields[c]) + "'", line_no, c + 1);
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw EmptyDataset("no data rows");
    return DataMatrix(rows, kept, std::move(values));
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error reading " + path.string());
    return parse_csv(buf.str(), options);
}

std::string to_csv(const DataMatrix& data) {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < data.n(); ++i) {
        auto r = data.row(i);
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) out.push_back(',');
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r[c]);
            out.append(buf, ptr);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const DataMatrix& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_csv(data);
    if (!out) throw IoError("error writing " + path.string());
}

BlobSample sample_blobs(const SyntheticSpec& spec) {
    if (spec.n_points == 0 || spec.dimension == 0 || spec.n_blobs == 0)
        throw InvalidSpec("n_points, dimension and n_blobs must be positive");
    if (spec.n_blobs > spec.n_points) throw InvalidSpec("more blobs than points");
    if (!(spec.blob_spread >= 0.0) || !std::isfinite(spec.blob_spread))
        throw InvalidSpec("blob_spread must be finite and non-negative");

    const std::size_t p = spec.dimension;
    auto rng = make_rng(spec.seed, 0);
    std::uniform_real_distribution<double> center_dist(-10.0, 10.0);
    std::vector<double> centers(spec.n_blobs * p);
    for (double& c : centers) c = center_dist(rng);

    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> values(spec.n_points * p);
    std::vector<std::size_t> labels(spec.n_points);
    for (std::size_t i = 0; i < spec.n_points; ++i) {
        std::size_t b = i % spec.n_blobs;
        labels[i] = b;
        for (std::size_t f = 0; f < p; ++f) {
            double z = spec.blob_spread > 0.0 ? spec.blob_spread * noise(rng) : 0.0;
            values[i * p + f] = centers[b * p + f] + z;
        }
    }
    return {DataMatrix(spec.n_points, p, std::move(values)), std::move(labels), std::move(centers)};
}

DataMatrix generate_blobs(const SyntheticSpec& spec) { return sample_blobs(spec).data; }

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    if (k > n) throw InvalidK("cannot draw " + std::to_string(k) + " distinct rows from " + std::to_string(n));
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t t = 0; t < k; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, n - 1);
        std::swap(pool[t], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace onebatch
