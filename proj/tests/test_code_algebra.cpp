#include <doctest.h>

#include <numeric>
#include <sstream>

#include "leeisd/code_algebra.hpp"

using namespace leeisd;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, const RingSpec& ring, Rng& rng) {
    Matrix m(r, c);
    std::uniform_int_distribution<Elem> d(0, ring.q() - 1);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

std::vector<Elem> naive_syndrome(const Matrix& H, const std::vector<Elem>& e, const RingSpec& ring) {
    std::vector<Elem> s(H.rows(), 0);
    for (std::size_t i = 0; i < H.rows(); ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < H.cols(); ++j) acc += std::uint64_t(H(i, j)) * e[j];
        s[i] = Elem(acc % ring.q());
    }
    return s;
}

// U H P must equal [[Id, A], [0, B]] exactly.
void check_block_form(const SdpInstance& inst, const PgeDecomposition& d) {
    const RingSpec& ring = inst.ring;
    const std::size_t m = inst.n - inst.k - d.ell, kl = inst.k + d.ell;
    Matrix uhp = multiply(d.U, inst.H.permute_columns(d.perm), ring);
    for (std::size_t i = 0; i < inst.n - inst.k; ++i)
        for (std::size_t j = 0; j < inst.n; ++j) {
            Elem want;
            if (j < m) want = (i == j) ? 1 : 0;
            else if (i < m) want = d.A(i, j - m);
            else want = d.B(i - m, j - m);
            REQUIRE(uhp(i, j) == want);
        }
    auto su = mul_transpose(inst.s, d.U, ring);
    CHECK(std::equal(d.s1.begin(), d.s1.end(), su.begin()));
    CHECK(std::equal(d.s2.begin(), d.s2.end(), su.begin() + m));
    CHECK(kl == d.A.cols());
}

}  // namespace

TEST_CASE("random instances are planted and reproducible") {
    for (std::uint32_t q : {4u, 5u, 7u, 9u}) {
        const RingSpec ring = RingSpec::from_modulus(q);
        Rng a(99), b(99);
        auto x = random_instance(20, 10, 9, ring, a);
        auto y = random_instance(20, 10, 9, ring, b);
        CHECK(x.planted.weight() == 9);
        CHECK(syndrome(x.instance.H, x.planted) == x.instance.s);
        CHECK(x.instance.H == y.instance.H);
        CHECK(x.instance.s == y.instance.s);
        CHECK(x.planted == y.planted);
    }
}

TEST_CASE("syndrome") {
    const RingSpec ring(7, 1);
    Rng rng(5);
    Matrix H = random_matrix(4, 9, ring, rng);
    CHECK(syndrome(H, std::vector<Elem>(9, 0), ring) == std::vector<Elem>(4, 0));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Elem> e(9);
        for (auto& x : e) x = rng() % 7;
        CHECK(syndrome(H, e, ring) == naive_syndrome(H, e, ring));
    }
    // [Id | B]: s = e1 + e2 B^T.
    Matrix B = random_matrix(4, 5, ring, rng), IB(4, 9);
    for (std::size_t i = 0; i < 4; ++i) {
        IB(i, i) = 1;
        for (std::size_t j = 0; j < 5; ++j) IB(i, 4 + j) = B(i, j);
    }
    std::vector<Elem> e{1, 2, 3, 4, 5, 6, 0, 1, 2};
    auto s2 = mul_transpose(std::span<const Elem>(e).subspan(4), B, ring);
    auto s = syndrome(IB, e, ring);
    for (std::size_t i = 0; i < 4; ++i) CHECK(s[i] == ring.add(e[i], s2[i]));
    CHECK_THROWS_AS(syndrome(H, std::vector<Elem>(8, 0), ring), DimensionMismatch);
}

TEST_CASE("elimination of a matrix already in systematic form") {
    const RingSpec ring(5, 1);
    Rng rng(1);
    SdpInstance inst{ring, 8, 4, Matrix(4, 8), {1, 2, 3, 4}, 3};
    Matrix B = random_matrix(4, 4, ring, rng);
    for (std::size_t i = 0; i < 4; ++i) {
        inst.H(i, i) = 1;
        for (std::size_t j = 0; j < 4; ++j) inst.H(i, 4 + j) = B(i, j);
    }
    std::vector<std::size_t> id(8);
    std::iota(id.begin(), id.end(), 0);
    auto d = partial_gaussian_elimination(inst, 0, id);
    REQUIRE(d);
    CHECK(d->U == Matrix::identity(4));
    CHECK(d->A == B);
    check_block_form(inst, *d);
}

TEST_CASE("successful eliminations reproduce the block form") {
    int ok = 0;
    for (std::uint32_t q : {4u, 5u, 7u, 8u, 9u, 47u}) {
        const RingSpec ring = RingSpec::from_modulus(q);
        Rng rng(q);
        for (int trial = 0; trial < 30; ++trial) {
            auto inst = random_instance(14, 6, 5, ring, rng).instance;
            for (std::size_t ell : {0u, 2u, 5u}) {
                std::vector<std::size_t> perm(14);
                std::iota(perm.begin(), perm.end(), 0);
                std::shuffle(perm.begin(), perm.end(), rng);
                auto d = partial_gaussian_elimination(inst, ell, perm);
                if (!d) continue;
                ++ok;
                check_block_form(inst, *d);
            }
        }
    }
    CHECK(ok > 300);
}

TEST_CASE("a column without unit entries cannot serve as a pivot over Z/4") {
    const RingSpec ring(2, 2);
    Rng rng(4);
    SdpInstance inst = random_instance(8, 4, 3, ring, rng).instance;
    for (std::size_t i = 0; i < 4; ++i) {
        inst.H(i, 0) = Elem(2 * (i % 2));  // entries in {0, 2}
        for (std::size_t j = 1; j < 4; ++j) inst.H(i, j) = Elem(2 * ((i + j) % 2));
    }
    // Columns 0..3 are all even: no unit pivot exists among the leading columns.
    std::vector<std::size_t> id(8);
    std::iota(id.begin(), id.end(), 0);
    CHECK_FALSE(partial_gaussian_elimination(inst, 0, id).has_value());
}

TEST_CASE("GV weight") {
    const RingSpec r5(5, 1);
    // F(t, 2, 5) = 1, 4, 8, 8, 4 and q^(n-k) = 5.
    CHECK(count_sphere(1, 2, r5) == 4);
    CHECK(count_sphere(2, 2, r5) == 8);
    CHECK(gv_weight(2, 1, r5) == 1);
    const RingSpec r3(3, 1);
    std::uint64_t prev = ~0ull;
    for (std::size_t k = 1; k < 12; ++k) {
        auto g = gv_weight(12, k, r3);
        CHECK(g <= prev);
        prev = g;
    }
    CHECK(gv_weight(12, 11, r3) >= 0);
}

TEST_CASE("verification reports the failing condition") {
    const RingSpec ring(7, 1);
    Rng rng(8);
    auto p = random_instance(12, 6, 6, ring, rng);
    std::string why;
    CHECK(verify_solution(p.instance, p.planted.entries(), &why));
    auto bad = p.planted.entries();
    bad[0] = ring.add(bad[0], 1);
    CHECK_FALSE(verify_solution(p.instance, bad, &why));
    CHECK(!why.empty());
    std::vector<Elem> zero(12, 0);
    CHECK_FALSE(verify_solution(p.instance, zero, &why));
    CHECK(why.find("syndrome") != std::string::npos);
    CHECK_FALSE(verify_solution(p.instance, std::vector<Elem>(5, 0), &why));
}

TEST_CASE("text formats round-trip") {
    const RingSpec ring(3, 2);
    Rng rng(12);
    auto p = random_instance(10, 4, 7, ring, rng);
    std::stringstream ss;
    write_instance(ss, p.instance);
    auto back = read_instance(ss);
    CHECK(back.ring == ring);
    CHECK(back.H == p.instance.H);
    CHECK(back.s == p.instance.s);
    CHECK(back.t == 7);
    std::stringstream es;
    write_solution(es, p.planted.entries());
    CHECK(read_solution(es, ring) == p.planted.entries());

    std::stringstream broken("5 1 4 2 1\n1 2 3\n");
    CHECK_THROWS_AS(read_instance(broken), FormatError);
}
