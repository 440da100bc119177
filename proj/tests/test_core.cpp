#include <doctest.h>

#include "l0erm/core.hpp"
#include "l0erm/dataset_io.hpp"

#include "oracles.hpp"

#include <sstream>

using namespace l0erm;

namespace {
DenseVector vec(std::initializer_list<double> v) {
    DenseVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}
}  // namespace

TEST_CASE("support_of") {
    CHECK(support_of(vec({3, 0, -2})) == SupportSet({0, 2}, 3));
    CHECK(support_of(vec({0, 0, 0})).empty());
    CHECK(support_of(vec({1e-12, 5, 0}), 1e-9) == SupportSet({1}, 3));
    CHECK_THROWS(support_of(vec({1}), -1.0));
}

TEST_CASE("restrict") {
    CHECK(restrict(vec({4, 5, 6}), SupportSet({1}, 3)) == vec({0, 5, 0}));
    CHECK(restrict(vec({4, 5, 6}), SupportSet::full(3)) == vec({4, 5, 6}));
    CHECK(restrict(vec({4, 5, 6}), SupportSet(3)) == vec({0, 0, 0}));
    CHECK_THROWS_AS(restrict(vec({4, 5, 6}), SupportSet({1}, 4)), std::invalid_argument);
}

TEST_CASE("smallest_nonzero_magnitude") {
    CHECK(smallest_nonzero_magnitude(vec({3, 0, -2})) == 2.0);
    CHECK(smallest_nonzero_magnitude(vec({-0.5})) == 0.5);
    CHECK(smallest_nonzero_magnitude(vec({1, 1, 1})) == 1.0);
    CHECK_THROWS_AS(smallest_nonzero_magnitude(vec({0, 0})), std::domain_error);
}

TEST_CASE("SupportSet validation and ordering") {
    const SupportSet s({4, 1, 2}, 5);
    CHECK(s.indices() == std::vector<std::size_t>{1, 2, 4});
    CHECK(s.contains(4));
    CHECK_FALSE(s.contains(3));
    CHECK(SupportSet({1}, 5).is_subset_of(s));
    CHECK_FALSE(SupportSet({3}, 5).is_subset_of(s));
    CHECK_THROWS(SupportSet({1, 1}, 5));
    CHECK_THROWS(SupportSet({5}, 5));
    CHECK(SupportSet({0, 3}, 5) < SupportSet({1, 2}, 5));
}

TEST_CASE("Dataset and Problem validation") {
    RowMatrix x(2, 2);
    x << 1, 0, 0, 1;
    CHECK_THROWS(Dataset(x, vec({1})));
    RowMatrix bad = x;
    bad(0, 0) = std::nan("");
    CHECK_THROWS(Dataset(bad, vec({1, 2})));
    CHECK_THROWS(Problem(LossKind::Logistic, Dataset(x, vec({1, 0.5}))));
    CHECK_NOTHROW(Problem(LossKind::Logistic, Dataset(x, vec({1, -1}))));
    CHECK_THROWS(Problem(LossKind::Squared, Dataset(x, vec({1, 0.5})), 0.0));

    const Dataset d(x, vec({1, 2}));
    const Dataset e = d.with_sample_replaced(1, vec({3, 4}), 5);
    CHECK(e.features()(1, 0) == 3);
    CHECK(e.responses()[1] == 5);
    CHECK(d.responses()[1] == 2);
}

TEST_CASE("restrict/support_of invariants") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        DenseVector w = oracle::gaussian_vector(gen, 12);
        for (Eigen::Index i = 0; i < w.size(); ++i)
            if (gen() % 3 == 0) w[i] = 0;
        std::vector<std::size_t> j;
        for (std::size_t i = 0; i < 12; ++i)
            if (gen() % 2) j.push_back(i);
        const SupportSet J(j, 12);
        const DenseVector r = restrict(w, J);
        CHECK(restrict(r, J) == r);
        CHECK(support_of(r).is_subset_of(J));
        CHECK(restrict(w, support_of(w)) == w);
    }
}

TEST_CASE("dataset CSV round trip is exact") {
    std::mt19937_64 gen(3);
    const Dataset d(oracle::gaussian_matrix(gen, 7, 4), oracle::gaussian_vector(gen, 7));
    std::stringstream ss;
    write_dataset_csv(ss, d);
    std::string header;
    std::getline(std::stringstream(ss.str()), header);
    CHECK(header == "y,x0,x1,x2,x3");
    const Dataset back = read_dataset_csv(ss);
    CHECK(back.features() == d.features());
    CHECK(back.responses() == d.responses());
}

TEST_CASE("format_double and parse_double") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(parse_double(" 1.5 ") == 1.5);
    CHECK_THROWS(parse_double("1.5x"));
    CHECK_THROWS(parse_double(""));
    std::stringstream bad("y,x0\n1,abc\n");
    CHECK_THROWS(read_dataset_csv(bad));
}
