#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leeisd/lee_core.hpp"
#include "leeisd/ring.hpp"

namespace leeisd {

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

/// Dense row-major matrix over Z/qZ.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, Elem fill = 0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Elem& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    Elem operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const Elem* row(std::size_t i) const { return data_.data() + i * cols_; }
    Elem* row(std::size_t i) { return data_.data() + i * cols_; }

    /// Columns [c0, c0 + count).
    Matrix column_block(std::size_t c0, std::size_t count) const;
    /// Rows [r0, r0 + count).
    Matrix row_block(std::size_t r0, std::size_t count) const;
    /// Column j of the result is column perm[j] of this matrix.
    Matrix permute_columns(const std::vector<std::size_t>& perm) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Elem> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b, const RingSpec& ring);

/// x M^T: entry i is <x, row i of M>.
std::vector<Elem> mul_transpose(std::span<const Elem> x, const Matrix& m, const RingSpec& ring);

/// (H, s, t) over a ring: find e with e H^T = s and Lee weight t.
struct SdpInstance {
    RingSpec ring;
    std::size_t n = 0;
    std::size_t k = 0;
    Matrix H;  // (n - k) x n
    std::vector<Elem> s;
    std::uint64_t t = 0;

    void validate() const;
};

struct PlantedInstance {
    SdpInstance instance;
    LeeVector planted;
};

PlantedInstance random_instance(std::size_t n, std::size_t k, std::uint64_t t, const RingSpec& ring, Rng& rng);

std::vector<Elem> syndrome(const Matrix& H, std::span<const Elem> e, const RingSpec& ring);
std::vector<Elem> syndrome(const Matrix& H, const LeeVector& e);

/// U H P = [[Id, A], [0, B]] with (s1, s2) = s U^T.
struct PgeDecomposition {
    Matrix U;
    std::vector<std::size_t> perm;  // column j of H P is column perm[j] of H
    Matrix A;                       // (n-k-ell) x (k+ell)
    Matrix B;                       // ell x (k+ell)
    std::vector<Elem> s1;
    std::vector<Elem> s2;
    std::size_t ell = 0;
};

/// Brings the first n-k-ell columns of H P to identity form using unit pivots only.
/// Column swaps stay inside those leading columns and are recorded in perm.
/// Returns nullopt when the selection cannot be reduced.
std::optional<PgeDecomposition> partial_gaussian_elimination(const SdpInstance& inst, std::size_t ell,
                                                             std::vector<std::size_t> perm);

/// Largest t such that F(t', n, q) <= q^(n-k) for every t' <= t.
std::uint64_t gv_weight(std::size_t n, std::size_t k, const RingSpec& ring);

/// True when e solves the instance; `reason` receives a diagnostic otherwise.
bool verify_solution(const SdpInstance& inst, std::span<const Elem> e, std::string* reason = nullptr);

// Line-oriented text formats: header "p s n k t", n-k rows of H, then the syndrome row.
void write_instance(std::ostream& os, const SdpInstance& inst);
SdpInstance read_instance(std::istream& is);
void write_solution(std::ostream& os, std::span<const Elem> e);
std::vector<Elem> read_solution(std::istream& is, const RingSpec& ring);

void save_instance(const std::string& path, const SdpInstance& inst);
SdpInstance load_instance(const std::string& path);
void save_solution(const std::string& path, std::span<const Elem> e);
std::vector<Elem> load_solution(const std::string& path, const RingSpec& ring);

}  // namespace leeisd
