#include <doctest.h>

#include "l0erm/datagen.hpp"
#include "l0erm/losses.hpp"
#include "l0erm/solver.hpp"
#include "l0erm/thresholding.hpp"

#include "oracles.hpp"

#include <limits>

using namespace l0erm;

namespace {

DenseVector planted(std::mt19937_64& gen, std::size_t p, std::size_t k) {
    DenseVector w = DenseVector::Zero(static_cast<Eigen::Index>(p));
    std::vector<std::size_t> idx(p);
    for (std::size_t i = 0; i < p; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), gen);
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    for (std::size_t i = 0; i < k; ++i) w[static_cast<Eigen::Index>(idx[i])] = (gen() % 2 ? 1 : -1) * mag(gen);
    return w;
}

// Plain gradient descent on the coordinates in J, step 1/L_J, until the
// restricted gradient is tiny.
DenseVector projected_gradient_oracle(const Problem& problem, const SupportSet& J) {
    const auto& x = problem.data().features();
    Eigen::MatrixXd xj(x.rows(), static_cast<Eigen::Index>(J.size()));
    for (std::size_t c = 0; c < J.size(); ++c) xj.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(J[c]));
    const Eigen::MatrixXd g = xj.transpose() * xj / static_cast<double>(x.rows());
    double lip = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().maxCoeff();
    if (problem.loss_kind() == LossKind::Logistic) lip *= problem.margin_scale() * problem.margin_scale() / 4;
    DenseVector w = DenseVector::Zero(x.cols());
    for (int it = 0; it < 2000000; ++it) {
        const DenseVector grad = restrict(empirical_gradient(problem, w), J);
        if (grad.norm() < 1e-13) break;
        w -= grad / lip;
    }
    return w;
}

}  // namespace

TEST_CASE("default_step_size") {
    CHECK(default_step_size(1.0) == 0.6666666666666666);
    CHECK(default_step_size(2.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(default_step_size(2.0 / 3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS(default_step_size(0.0));
    CHECK_THROWS(default_step_size(-1.0));
}

TEST_CASE("recommended_sparsity and binomial") {
    CHECK(recommended_sparsity(1.0, 1.0, 10) == 320);
    CHECK(recommended_sparsity(2.0, 1.0, 1) == 128);
    CHECK_THROWS(recommended_sparsity(1.0, 0.0, 1));
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(4, 5) == 0);
    CHECK(binomial(1000, 500) == std::numeric_limits<std::size_t>::max());
}

TEST_CASE("IHT recovers a planted model on an orthonormal design") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t p = 20, k = 4, n = 40;
        const RowMatrix x = oracle::orthonormal_design(gen, n, p);
        const DenseVector w_bar = planted(gen, p, k);
        const Problem problem(LossKind::Squared, Dataset(x, x * w_bar));
        IhtParams params;
        params.k = k;
        params.grad_tol = 1e-12;
        const SolveReport r = iht_solve(problem, params);
        CHECK(r.converged);
        CHECK(r.support == support_of(w_bar));
        CHECK((r.solution - w_bar).norm() <= 1e-8);
        REQUIRE(r.debiased);
        CHECK((*r.debiased - w_bar).norm() <= 1e-10);
        CHECK(r.objective == empirical_risk(problem, r.solution));
        CHECK(support_of(r.solution).is_subset_of(r.support));
    }
}

TEST_CASE("IHT started at the optimum stops within two iterations") {
    std::mt19937_64 gen(12);
    const RowMatrix x = oracle::gaussian_matrix(gen, 30, 10);
    const DenseVector w_bar = planted(gen, 10, 3);
    const Problem problem(LossKind::Squared, Dataset(x, x * w_bar));
    IhtParams params;
    params.k = 3;
    params.w0 = w_bar;
    params.record_trace = true;
    const SolveReport r = iht_solve(problem, params);
    CHECK(r.converged);
    CHECK(r.iters_run <= 2);
    CHECK((r.solution - w_bar).norm() <= 1e-12);
    REQUIRE(r.trace);
    CHECK(r.trace->iterates.size() == r.iters_run + 1);
    CHECK(r.trace->margins.size() == r.iters_run);

    params.w0 = DenseVector::Ones(10);
    CHECK_THROWS(iht_solve(problem, params));
    params.w0.reset();
    params.k = 0;
    CHECK_THROWS(iht_solve(problem, params));
}

TEST_CASE("IHT trace invariants: descent and sparsity") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 30; ++trial) {
        const bool logistic = trial % 2;
        const Eigen::Index n = 25 + trial, p = 15;
        const RowMatrix x = oracle::gaussian_matrix(gen, n, p);
        const DenseVector w_bar = planted(gen, p, 3);
        DenseVector y = x * w_bar + oracle::gaussian_vector(gen, n, 0.5);
        if (logistic) y = y.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
        const Problem problem(logistic ? LossKind::Logistic : LossKind::Squared, Dataset(x, y));
        IhtParams params;
        params.k = 1 + trial % 5;
        params.record_trace = true;
        params.max_iters = 300;
        const SolveReport r = iht_solve(problem, params);
        const auto& obj = r.trace->objectives;
        for (std::size_t t = 1; t < obj.size(); ++t) CHECK(obj[t] <= obj[t - 1] * (1 + 1e-10) + 1e-300);
        for (const auto& w : r.trace->iterates) CHECK(count_nonzeros(w) <= params.k);
        CHECK(r.min_margin == r.trace->min_margin());
    }
}

TEST_CASE("IHT reports divergence with the iteration") {
    std::mt19937_64 gen(3);
    const RowMatrix x = oracle::gaussian_matrix(gen, 20, 5);
    const Problem problem(LossKind::Squared, Dataset(x, oracle::gaussian_vector(gen, 20)));
    IhtParams params;
    params.k = 5;
    params.step_size = 1e10;
    params.max_iters = 10000;
    try {
        iht_solve(problem, params);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() >= 1);
    }
}

TEST_CASE("Gram and direct objectives give the same run") {
    std::mt19937_64 gen(15);
    const RowMatrix x = oracle::gaussian_matrix(gen, 60, 40);
    const DenseVector w_bar = planted(gen, 40, 5);
    const Problem problem(LossKind::Squared, Dataset(x, x * w_bar + oracle::gaussian_vector(gen, 60, 0.3)));
    IhtParams params;
    params.k = 6;
    const SolveReport direct = iht_solve(problem, params);
    const FeatureCurvature curv = prepare_curvature(x, true);
    const SolveReport gram = iht_solve(problem, params, &curv);
    CHECK(gram.support == direct.support);
    CHECK(gram.step_size == doctest::Approx(direct.step_size).epsilon(1e-12));
    CHECK((gram.solution - direct.solution).norm() <= 1e-8);
}

TEST_CASE("debias") {
    std::mt19937_64 gen(41);
    SUBCASE("true support on noiseless data returns w_bar") {
        const RowMatrix x = oracle::gaussian_matrix(gen, 30, 12);
        const DenseVector w_bar = planted(gen, 12, 4);
        const Problem problem(LossKind::Squared, Dataset(x, x * w_bar));
        CHECK((debias(problem, support_of(w_bar)) - w_bar).norm() <= 1e-10);
    }
    SUBCASE("single coordinate is the scalar least-squares fit") {
        const RowMatrix x = oracle::gaussian_matrix(gen, 25, 6);
        const DenseVector y = oracle::gaussian_vector(gen, 25);
        const Problem problem(LossKind::Squared, Dataset(x, y));
        const DenseVector w = debias(problem, SupportSet({2}, 6));
        CHECK(w[2] == doctest::Approx(x.col(2).dot(y) / x.col(2).squaredNorm()).epsilon(1e-13));
        CHECK(count_nonzeros(w) == 1);
    }
    SUBCASE("matches a gradient-descent oracle") {
        for (auto kind : {LossKind::Squared, LossKind::Logistic}) {
            for (int trial = 0; trial < 5; ++trial) {
                const RowMatrix x = oracle::gaussian_matrix(gen, 40, 8);
                DenseVector y = x * planted(gen, 8, 3) + oracle::gaussian_vector(gen, 40);
                if (kind == LossKind::Logistic) y = y.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
                const Problem problem(kind, Dataset(x, y), 1.0);
                const SupportSet J({1, 4, 6}, 8);
                CHECK((debias(problem, J) - projected_gradient_oracle(problem, J)).norm() <= 1e-7);
            }
        }
    }
    SUBCASE("rank-deficient support gives the minimum-norm solution") {
        RowMatrix x = oracle::gaussian_matrix(gen, 10, 3);
        x.col(1) = x.col(0);
        const DenseVector y = 2.0 * x.col(0);
        const DenseVector w = debias(Problem(LossKind::Squared, Dataset(x, y)), SupportSet({0, 1}, 3));
        CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS(debias(Problem(LossKind::Squared, Dataset(RowMatrix::Ones(2, 2), DenseVector::Ones(2))), SupportSet(2)));
}

TEST_CASE("debiased iterate is a fixed point of the IHT map") {
    std::mt19937_64 gen(19);
    const RowMatrix x = oracle::gaussian_matrix(gen, 80, 20);
    const DenseVector w_bar = planted(gen, 20, 4);
    const Problem problem(LossKind::Squared, Dataset(x, x * w_bar + oracle::gaussian_vector(gen, 80, 0.1)));
    IhtParams params;
    params.k = 4;
    params.grad_tol = 1e-12;
    const SolveReport r = iht_solve(problem, params);
    REQUIRE(r.converged);
    const DenseVector& w = *r.debiased;
    const DenseVector next = hard_threshold(w - r.step_size * empirical_gradient(problem, w), 4).vector;
    CHECK((next - w).norm() <= 1e-10);
}

TEST_CASE("brute-force oracle") {
    std::mt19937_64 gen(55);
    SUBCASE("planted p=4, k=2") {
        const RowMatrix x = oracle::gaussian_matrix(gen, 8, 4);
        DenseVector w_bar(4);
        w_bar << 1, -2, 0, 0;
        const SolveReport r = brute_force_l0_erm(Problem(LossKind::Squared, Dataset(x, x * w_bar)), 2);
        CHECK(r.support == SupportSet({0, 1}, 4));
        CHECK(r.objective <= 1e-20);
    }
    SUBCASE("k = p is unconstrained least squares") {
        const RowMatrix x = oracle::gaussian_matrix(gen, 12, 5);
        const DenseVector y = oracle::gaussian_vector(gen, 12);
        const SolveReport r = brute_force_l0_erm(Problem(LossKind::Squared, Dataset(x, y)), 5);
        const DenseVector ls = Eigen::MatrixXd(x).colPivHouseholderQr().solve(y);
        CHECK((r.solution - ls).norm() <= 1e-10);
    }
    SUBCASE("dominates debiased IHT") {
        for (int trial = 0; trial < 20; ++trial) {
            const bool logistic = trial % 2;
            const RowMatrix x = oracle::gaussian_matrix(gen, 30, 9);
            DenseVector y = x * planted(gen, 9, 2) + oracle::gaussian_vector(gen, 30);
            if (logistic) y = y.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
            const Problem problem(logistic ? LossKind::Logistic : LossKind::Squared, Dataset(x, y), 1.0);
            IhtParams params;
            params.k = 2;
            const SolveReport iht = iht_solve(problem, params);
            const SolveReport bf = brute_force_l0_erm(problem, 2);
            CHECK(bf.objective <= empirical_risk(problem, *iht.debiased) + 1e-12);
        }
    }
    SUBCASE("ties go to the lexicographically smallest support") {
        RowMatrix x = oracle::gaussian_matrix(gen, 10, 4);
        x.col(3) = x.col(1);
        const DenseVector y = x.col(1);
        const SolveReport r = brute_force_l0_erm(Problem(LossKind::Squared, Dataset(x, y)), 1);
        CHECK(r.support == SupportSet({1}, 4));
    }
    SUBCASE("caps") {
        const Problem wide(LossKind::Squared, Dataset(RowMatrix::Ones(2, 30), DenseVector::Ones(2)));
        CHECK_THROWS_AS(brute_force_l0_erm(wide, 2), CapExceededError);
        CHECK_THROWS_AS(brute_force_l0_erm(wide, 15, 40), CapExceededError);
    }
}

TEST_CASE("population IHT trajectory") {
    std::mt19937_64 gen(6);
    const DenseVector w_bar = planted(gen, 30, 5);
    const GroundTruth truth(w_bar, 1.0);
    IhtParams params;
    params.k = 5;
    params.step_size = 0.5;
    params.max_iters = 50;
    params.grad_tol = 0.0;
    const IhtTrace trace = population_iht_trajectory(truth, params);
    for (std::size_t t = 1; t < trace.iterates.size(); ++t) {
        const DenseVector expected = (1 - std::pow(0.5, static_cast<double>(t))) * w_bar;
        CHECK((trace.iterates[t] - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK(trace.min_margin() == doctest::Approx(0.5 * smallest_nonzero_magnitude(w_bar)).epsilon(1e-12));

    const IhtTrace zero = population_iht_trajectory(GroundTruth(DenseVector::Zero(6), 1.0), params);
    for (const auto& w : zero.iterates) CHECK(w.norm() == 0.0);
    for (double m : zero.margins) CHECK(m == 0.0);

    CHECK_THROWS(population_iht_trajectory(GroundTruth(w_bar, 1.0, IdentityCovariance{}, ModelKind::Logistic), params));
}
