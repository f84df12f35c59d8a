#ifndef ONEBATCH_DATA_MATRIX_HPP
#define ONEBATCH_DATA_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace onebatch {

/// Seed of a stochastic operation. Equal seeds and equal configuration give
/// equal outputs (indices included) within one build of the library.
struct RandomSeed {
    std::uint64_t value = 0;
};

/// Engine for one named stream of a seed. Distinct streams of the same seed
/// are independent, so e.g. batch sampling and medoid initialization never
/// share draws.
std::mt19937_64 make_rng(RandomSeed seed, std::uint64_t stream);

/// Dense n x p point set, row-major. Immutable once built; every value is finite.
class DataMatrix {
public:
    DataMatrix(std::size_t n, std::size_t p, std::vector<double> values);

    std::size_t n() const noexcept { return n_; }
    std::size_t p() const noexcept { return p_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * p_, p_};
    }
    std::span<const double> values() const noexcept { return values_; }

    /// Copy of the listed rows, in the listed order.
    DataMatrix select_rows(std::span<const std::size_t> rows) const;

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    std::size_t n_;
    std::size_t p_;
    std::vector<double> values_;
};

struct CsvOptions {
    bool has_header = false;
    std::vector<std::size_t> drop_columns;  // 0-based indices into the raw columns
};

/// Comma-separated, '.' decimal mark, optional single header row.
/// Blank lines are skipped; a trailing '\r' is tolerated.
DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
DataMatrix parse_csv(const std::string& text, const CsvOptions& options = {});

/// Shortest round-trip formatting, so parse_csv(to_csv(m)) == m.
std::string to_csv(const DataMatrix& data);
void write_csv(const std::filesystem::path& path, const DataMatrix& data);

struct SyntheticSpec {
    std::size_t n_points = 1000;
    std::size_t dimension = 2;
    std::size_t n_blobs = 4;
    double blob_spread = 1.0;
    RandomSeed seed{};
};

/// Points together with the generating blob of each row and the blob centers
/// (n_blobs x dimension, row-major).
struct BlobSample {
    DataMatrix data;
    std::vector<std::size_t> labels;
    std::vector<double> centers;
};

/// Isotropic Gaussian blobs. Centers are uniform in [-10, 10]^p; row i
/// belongs to blob i % n_blobs.
BlobSample sample_blobs(const SyntheticSpec& spec);
DataMatrix generate_blobs(const SyntheticSpec& spec);

/// k distinct values of [0, n), uniformly, in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::mt19937_64& rng);

}  // namespace onebatch

#endif  // ONEBATCH_DATA_MATRIX_HPP
