#include "leeisd/code_algebra.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace leeisd {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::column_block(std::size_t c0, std::size_t count) const {
    if (c0 + count > cols_) throw DimensionMismatch("column_block: range outside the matrix");
    Matrix out(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, c0 + j);
    return out;
}

Matrix Matrix::row_block(std::size_t r0, std::size_t count) const {
    if (r0 + count > rows_) throw DimensionMismatch("row_block: range outside the matrix");
    Matrix out(count, cols_);
    std::copy(row(r0), row(r0) + count * cols_, out.row(0));
    return out;
}

Matrix Matrix::permute_columns(const std::vector<std::size_t>& perm) const {
    if (perm.size() != cols_) throw DimensionMismatch("permute_columns: permutation length differs from columns");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, perm[j]);
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b, const RingSpec& ring) {
    if (a.cols() != b.rows()) throw DimensionMismatch("multiply: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    const std::uint64_t q = ring.q();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::uint64_t acc = 0;
            for (std::size_t l = 0; l < a.cols(); ++l) acc = (acc + std::uint64_t(a(i, l)) * b(l, j)) % q;
            out(i, j) = static_cast<Elem>(acc);
        }
    return out;
}

std::vector<Elem> mul_transpose(std::span<const Elem> x, const Matrix& m, const RingSpec& ring) {
    if (x.size() != m.cols()) throw DimensionMismatch("dimension mismatch: vector length " +
                                                      std::to_string(x.size()) + " vs " + std::to_string(m.cols()));
    std::vector<Elem> out(m.rows());
    const std::uint64_t q = ring.q();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Elem* r = m.row(i);
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < x.size(); ++j) acc = (acc + std::uint64_t(r[j]) * x[j]) % q;
        out[i] = static_cast<Elem>(acc);
    }
    return out;
}

void SdpInstance::validate() const {
    if (k == 0 || k >= n) throw InvalidArgument("instance: need 0 < k < n");
    if (H.rows() != n - k || H.cols() != n) throw DimensionMismatch("instance: H must be (n-k) x n");
    if (s.size() != n - k) throw DimensionMismatch("instance: syndrome must have length n-k");
    if (t > std::uint64_t(n) * ring.M()) throw InvalidArgument("instance: t exceeds nM");
    for (std::size_t i = 0; i < H.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (H(i, j) >= ring.q()) throw InvalidArgument("instance: H entry outside [0, q)");
    for (Elem x : s)
        if (x >= ring.q()) throw InvalidArgument("instance: syndrome entry outside [0, q)");
}

PlantedInstance random_instance(std::size_t n, std::size_t k, std::uint64_t t, const RingSpec& ring, Rng& rng) {
    if (k == 0 || k >= n) throw InvalidArgument("random_instance: need 0 < k < n");
    if (t > std::uint64_t(n) * ring.M()) throw InvalidArgument("random_instance: t exceeds nM");
    std::uniform_int_distribution<Elem> elem(0, ring.q() - 1);
    Matrix H(n - k, n);
    for (std::size_t i = 0; i < n - k; ++i)
        for (std::size_t j = 0; j < n; ++j) H(i, j) = elem(rng);
    LeeVector e = sample_sphere(t, n, ring, rng);
    auto s = syndrome(H, e);
    return {SdpInstance{ring, n, k, std::move(H), std::move(s), t}, std::move(e)};
}

std::vector<Elem> syndrome(const Matrix& H, std::span<const Elem> e, const RingSpec& ring) {
    return mul_transpose(e, H, ring);
}

std::vector<Elem> syndrome(const Matrix& H, const LeeVector& e) { return mul_transpose(e.entries(), H, e.ring()); }

std::optional<PgeDecomposition> partial_gaussian_elimination(const SdpInstance& inst, std::size_t ell,
                                                             std::vector<std::size_t> perm) {
    const RingSpec& ring = inst.ring;
    const std::size_t r = inst.n - inst.k;
    if (ell > r) throw InvalidArgument("partial_gaussian_elimination: ell exceeds n-k");
    if (perm.size() != inst.n) throw DimensionMismatch("partial_gaussian_elimination: bad permutation length");
    const std::size_t m = r - ell;
    Matrix W = inst.H.permute_columns(perm);
    Matrix U = Matrix::identity(r);

    auto swap_rows = [](Matrix& X, std::size_t a, std::size_t b) {
        if (a != b) std::swap_ranges(X.row(a), X.row(a) + X.cols(), X.row(b));
    };
    auto axpy_row = [&](Matrix& X, std::size_t dst, std::size_t src, Elem factor) {
        // row dst -= factor * row src
        for (std::size_t j = 0; j < X.cols(); ++j) X(dst, j) = ring.sub(X(dst, j), ring.mul(factor, X(src, j)));
    };
    auto scale_row = [&](Matrix& X, std::size_t i, Elem factor) {
        for (std::size_t j = 0; j < X.cols(); ++j) X(i, j) = ring.mul(factor, X(i, j));
    };

    for (std::size_t c = 0; c < m; ++c) {
        std::size_t prow = r, pcol = m;
        for (std::size_t j = c; j < m && prow == r; ++j)
            for (std::size_t i = c; i < r; ++i)
                if (ring.is_unit(W(i, j))) {
                    prow = i;
                    pcol = j;
                    break;
                }
        if (prow == r) return std::nullopt;
        if (pcol != c) {
            for (std::size_t i = 0; i < r; ++i) std::swap(W(i, c), W(i, pcol));
            std::swap(perm[c], perm[pcol]);
        }
        swap_rows(W, c, prow);
        swap_rows(U, c, prow);
        Elem inv = ring.inverse(W(c, c));
        scale_row(W, c, inv);
        scale_row(U, c, inv);
        for (std::size_t i = 0; i < r; ++i) {
            if (i == c || W(i, c) == 0) continue;
            Elem f = W(i, c);
            axpy_row(W, i, c, f);
            axpy_row(U, i, c, f);
        }
    }

    PgeDecomposition d;
    d.ell = ell;
    d.perm = std::move(perm);
    d.A = W.row_block(0, m).column_block(m, inst.n - m);
    d.B = W.row_block(m, ell).column_block(m, inst.n - m);
    auto st = mul_transpose(inst.s, U, ring);
    d.s1.assign(st.begin(), st.begin() + m);
    d.s2.assign(st.begin() + m, st.end());
    d.U = std::move(U);
    return d;
}

std::uint64_t gv_weight(std::size_t n, std::size_t k, const RingSpec& ring) {
    if (k == 0 || k >= n) throw InvalidArgument("gv_weight: need 0 < k < n");
    const ExactCount bound = power(ring.q(), n - k);
    const std::uint64_t top = std::uint64_t(n) * ring.M();
    std::uint64_t t = 0;
    while (t < top && count_sphere(t + 1, n, ring) <= bound) ++t;
    return t;
}

bool verify_solution(const SdpInstance& inst, std::span<const Elem> e, std::string* reason) {
    auto fail = [&](std::string why) {
        if (reason) *reason = std::move(why);
        return false;
    };
    if (e.size() != inst.n) return fail("length " + std::to_string(e.size()) + " differs from n = " +
                                        std::to_string(inst.n));
    for (Elem x : e)
        if (x >= inst.ring.q()) return fail("entry outside [0, q)");
    if (syndrome(inst.H, e, inst.ring) != inst.s) return fail("syndrome mismatch");
    const std::uint64_t w = lee_weight(e, inst.ring);
    if (w != inst.t) return fail("Lee weight " + std::to_string(w) + " differs from t = " + std::to_string(inst.t));
    if (reason) reason->clear();
    return true;
}

// ---------------------------------------------------------------------------
// Text I/O

namespace {

std::vector<Elem> read_row(std::istream& is, std::size_t len, const RingSpec& ring, const char* what) {
    std::string line;
    while (std::getline(is, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    if (!is && line.empty()) throw FormatError(std::string("unexpected end of input while reading ") + what);
    std::istringstream ls(line);
    std::vector<Elem> row;
    long long x;
    while (ls >> x) {
        if (x < 0 || x >= static_cast<long long>(ring.q()))
            throw FormatError(std::string(what) + ": value " + std::to_string(x) + " outside [0, q)");
        row.push_back(static_cast<Elem>(x));
    }
    if (!ls.eof()) throw FormatError(std::string(what) + ": non-numeric token");
    if (row.size() != len)
        throw FormatError(std::string(what) + ": expected " + std::to_string(len) + " values, got " +
                          std::to_string(row.size()));
    return row;
}

void write_row(std::ostream& os, std::span<const Elem> row) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
    os << '\n';
}

}  // namespace

void write_instance(std::ostream& os, const SdpInstance& inst) {
    os << inst.ring.p() << ' ' << inst.ring.s() << ' ' << inst.n << ' ' << inst.k << ' ' << inst.t << '\n';
    for (std::size_t i = 0; i < inst.H.rows(); ++i) write_row(os, {inst.H.row(i), inst.H.cols()});
    write_row(os, inst.s);
}

SdpInstance read_instance(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("instance: missing header");
    std::istringstream hs(line);
    long long p, s, n, k, t;
    if (!(hs >> p >> s >> n >> k >> t)) throw FormatError("instance: header must be 'p s n k t'");
    if (p < 2 || s < 1 || n < 2 || k < 1 || k >= n || t < 0) throw FormatError("instance: header values out of range");
    RingSpec ring(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(s));
    SdpInstance inst{ring, std::size_t(n), std::size_t(k), Matrix(n - k, n), {}, std::uint64_t(t)};
    for (long long i = 0; i < n - k; ++i) {
        auto row = read_row(is, n, ring, "parity-check row");
        std::copy(row.begin(), row.end(), inst.H.row(i));
    }
    inst.s = read_row(is, n - k, ring, "syndrome");
    inst.validate();
    return inst;
}

void write_solution(std::ostream& os, std::span<const Elem> e) { write_row(os, e); }

std::vector<Elem> read_solution(std::istream& is, const RingSpec& ring) {
    std::string line;
    while (std::getline(is, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    std::istringstream ls(line);
    std::vector<Elem> e;
    long long x;
    while (ls >> x) {
        if (x < 0 || x >= static_cast<long long>(ring.q())) throw FormatError("solution: value outside [0, q)");
        e.push_back(static_cast<Elem>(x));
    }
    if (!ls.eof()) throw FormatError("solution: non-numeric token");
    return e;
}

void save_instance(const std::string& path, const SdpInstance& inst) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_instance(os, inst);
}

SdpInstance load_instance(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return read_instance(is);
}

void save_solution(const std::string& path, std::span<const Elem> e) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_solution(os, e);
}

std::vector<Elem> load_solution(const std::string& path, const RingSpec& ring) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return read_solution(is, ring);
}

}  // namespace leeisd
