#include <doctest.h>

#include "l0erm/datagen.hpp"
#include "l0erm/losses.hpp"
#include "l0erm/metrics.hpp"
#include "l0erm/thresholding.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

using namespace l0erm;

namespace {
Problem sample_problem(const GroundTruth& truth, std::size_t n, std::uint64_t seed) {
    const LossKind kind = truth.model_kind() == ModelKind::Linear ? LossKind::Squared : LossKind::Logistic;
    return Problem(kind, gen_dataset(truth, n, Seed(seed)), truth.margin_scale());
}
}  // namespace

TEST_CASE("risk_report excess modes") {
    DenseVector w_bar = DenseVector::Zero(6);
    w_bar.head(3) << 2, -1, 0.5;
    const GroundTruth truth(w_bar, 1.0);
    const Problem problem = sample_problem(truth, 50, 1);
    const Seed seed(3);

    const RiskReport at_bar = risk_report(problem, w_bar, truth, ClosedFormPopulation{}, WhiteBoxLinearExcess{}, seed);
    CHECK(*at_bar.excess_risk == 0.0);
    CHECK(at_bar.population_risk == 0.5);
    CHECK(at_bar.generalization_gap == at_bar.population_risk - at_bar.empirical_risk);
    CHECK(at_bar.empirical_risk == empirical_risk(problem, w_bar));

    DenseVector e1 = DenseVector::Zero(6);
    e1[0] = 1;
    CHECK(*risk_report(problem, w_bar + e1, truth, ClosedFormPopulation{}, WhiteBoxLinearExcess{}, seed).excess_risk == 0.5);

    const DenseVector hk = hard_threshold(w_bar, 2).vector;
    CHECK(*risk_report(problem, hk, truth, ClosedFormPopulation{}, BlackBoxLinearExcess{2}, seed).excess_risk == 0.0);

    std::mt19937_64 gen(1);
    for (int t = 0; t < 10; ++t) {
        const DenseVector w = oracle::gaussian_vector(gen, 6);
        const double white = *risk_report(problem, w, truth, ClosedFormPopulation{}, WhiteBoxLinearExcess{}, seed).excess_risk;
        for (std::size_t k = 3; k <= 6; ++k) {
            const double black = *risk_report(problem, w, truth, ClosedFormPopulation{}, BlackBoxLinearExcess{k}, seed).excess_risk;
            CHECK(black == doctest::Approx(white).epsilon(1e-14));
        }
    }

    const RiskReport none = risk_report(problem, w_bar, truth, ClosedFormPopulation{}, NoExcess{}, seed);
    CHECK_FALSE(none.excess_risk);

    CHECK_THROWS_AS(risk_report(problem, w_bar, truth, ClosedFormPopulation{}, WhiteBoxMonteCarloExcess{}, seed),
                    std::invalid_argument);
    const GroundTruth logistic(w_bar, 0.0, IdentityCovariance{}, ModelKind::Logistic);
    const Problem lp = sample_problem(logistic, 50, 2);
    CHECK_THROWS_AS(risk_report(lp, w_bar, logistic, ClosedFormPopulation{}, NoExcess{}, seed), std::invalid_argument);
    CHECK_THROWS_AS(risk_report(lp, w_bar, logistic, MonteCarloPopulation{1000}, WhiteBoxLinearExcess{}, seed),
                    std::invalid_argument);
}

TEST_CASE("Monte Carlo risk report") {
    DenseVector w_bar = DenseVector::Zero(8);
    w_bar.head(2) << 1, -1;
    const GroundTruth truth(w_bar, 0.0, IdentityCovariance{}, ModelKind::Logistic);
    const Problem problem = sample_problem(truth, 100, 4);
    const RiskReport r = risk_report(problem, w_bar, truth, MonteCarloPopulation{20000}, WhiteBoxMonteCarloExcess{}, Seed(9));
    CHECK(*r.excess_risk == 0.0);
    CHECK(r.population_std_error > 0.0);
    CHECK(r.generalization_gap == r.population_risk - r.empirical_risk);
    const RiskReport again = risk_report(problem, w_bar, truth, MonteCarloPopulation{20000}, WhiteBoxMonteCarloExcess{}, Seed(9));
    CHECK(again.population_risk == r.population_risk);

    const RiskReport off = risk_report(problem, DenseVector::Zero(8), truth, MonteCarloPopulation{20000},
                                       WhiteBoxMonteCarloExcess{}, Seed(9));
    CHECK(*off.excess_risk > 0.0);
    CHECK(*off.excess_risk == doctest::Approx(off.population_risk - r.population_risk).epsilon(1e-10));
}

TEST_CASE("theory_bound") {
    CHECK(theory_bound(BoundKind::WhiteBox, 100, 1000, 500, 1, 1, 1, 1) == doctest::Approx(1.381551).epsilon(1e-6));
    CHECK(theory_bound(BoundKind::WhiteBox, 100, 1000, 500, 1, 1, 1, 1) == doctest::Approx(100 * std::log(1000.0) / 500).epsilon(1e-15));
    CHECK(theory_bound(BoundKind::Uniform, 100, 1000, 1000, 1, 1, 1, 1) == doctest::Approx(std::sqrt(100 * std::log(1000.0) / 1000)).epsilon(1e-15));
    CHECK(theory_bound(BoundKind::Uniform, 100, 1000, 1000, 1, 1, 1, 1) == doctest::Approx(0.8311).epsilon(1e-4));
    CHECK(theory_bound(BoundKind::StrongSignal, 1, 1, 100, 1, 1, 1, 2) == doctest::Approx(2 * std::log(100.0) / 10).epsilon(1e-15));
    for (auto kind : {BoundKind::WhiteBox, BoundKind::Uniform, BoundKind::StrongSignal}) {
        // log(n)/sqrt(n) peaks at n = e^2, so monotonicity is checked past it.
        for (double n : {8.0, 10.0, 500.0, 1e5}) {
            CHECK(theory_bound(kind, 50, 1000, 2 * n, 1, 1, 1, 1) < theory_bound(kind, 50, 1000, n, 1, 1, 1, 1));
        }
        CHECK_THROWS(theory_bound(kind, 50, 1000, 1, 1, 1, 1, 1));
        CHECK_THROWS(theory_bound(kind, 0, 1000, 100, 1, 1, 1, 1));
        CHECK_THROWS(theory_bound(kind, 50, 1000, 100, 1, 1, -1, 1));
        CHECK(parse_bound_kind(to_string(kind)) == kind);
    }
    CHECK_THROWS(parse_bound_kind("nope"));

    std::vector<double> grid;
    for (int i = 0; i < 8; ++i) grid.push_back(300 + 100 * i);
    for (double k : {50.0, 100.0}) {
        for (double s : {0.5, 1.0}) {
            const BoundCurve c = bound_curve(BoundKind::WhiteBox, grid, k, 1000, s, 1, 1, 1);
            for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].second < c.points[i - 1].second);
            CHECK(bound_curve(BoundKind::WhiteBox, grid, 2 * k, 1000, s, 1, 1, 1).points[0].second > c.points[0].second);
            CHECK(bound_curve(BoundKind::WhiteBox, grid, k, 1000, 2 * s, 1, 1, 1).points[0].second > c.points[0].second);
        }
    }
}

TEST_CASE("restricted eigenvalue estimate") {
    std::mt19937_64 gen(17);
    const RowMatrix ortho = oracle::orthonormal_design(gen, 40, 12);
    for (std::size_t s : {1, 3, 12}) {
        CHECK(restricted_eigenvalue_estimate(ortho, s, 200, Seed(1)).mu_hat == doctest::Approx(1.0).epsilon(1e-10));
    }

    for (std::size_t p : {5, 8, 10}) {
        const RowMatrix x = oracle::gaussian_matrix(gen, 12, static_cast<Eigen::Index>(p));
        for (std::size_t s = 1; s <= std::min<std::size_t>(p, 4); ++s) {
            double best = std::numeric_limits<double>::infinity();
            oracle::for_each_subset(p, s, [&](const std::vector<std::size_t>& j) {
                Eigen::MatrixXd xj(x.rows(), static_cast<Eigen::Index>(s));
                for (std::size_t c = 0; c < s; ++c) xj.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(j[c]));
                const Eigen::MatrixXd g = xj.transpose() * xj / 12.0;
                best = std::min(best, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff());
            });
            const auto est = restricted_eigenvalue_estimate(x, s, 500, Seed(2));
            CHECK(est.mu_hat == doctest::Approx(best).epsilon(1e-12));
            CHECK(restricted_min_eigenvalue(x, est.support_of_min) == doctest::Approx(est.mu_hat).epsilon(1e-12));
        }
    }

    const RowMatrix thin = oracle::gaussian_matrix(gen, 3, 10);
    CHECK(std::abs(restricted_eigenvalue_estimate(thin, 5, 20, Seed(3)).mu_hat) <= 1e-10);

    const RowMatrix x = oracle::gaussian_matrix(gen, 30, 20);
    std::vector<std::size_t> nested;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t i : {3, 17, 5, 0, 11, 9}) {
        nested.push_back(i);
        const double mu = restricted_min_eigenvalue(x, SupportSet(nested, 20));
        CHECK(mu <= previous + 1e-12);
        previous = mu;
    }
    CHECK_THROWS(restricted_eigenvalue_estimate(x, 21, 5, Seed(1)));
    CHECK_THROWS(restricted_eigenvalue_estimate(x, 0, 5, Seed(1)));
}

TEST_CASE("gradient concentration") {
    DenseVector w_bar = DenseVector::Zero(50);
    w_bar.head(5).setOnes();
    const GroundTruth quiet(w_bar, 0.0);
    const auto zero = gradient_concentration_check(quiet, 100, 20, 0.05, Seed(1));
    CHECK(zero.empirical_quantile == 0.0);
    CHECK(zero.pass);

    const GroundTruth noisy(w_bar, 1.0);
    const auto a = gradient_concentration_check(noisy, 100, 20, 0.05, Seed(1));
    const auto b = gradient_concentration_check(noisy, 400, 20, 0.05, Seed(1));
    CHECK(b.bound == doctest::Approx(a.bound / 2).epsilon(1e-14));
    CHECK(a.bound == doctest::Approx(std::sqrt(2 * std::log(50 / 0.05) / 100)).epsilon(1e-14));

    int passes = 0;
    for (int meta = 0; meta < 20; ++meta) passes += gradient_concentration_check(noisy, 100, 200, 0.05, Seed(100 + meta)).pass;
    CHECK(passes >= 19);
    CHECK_THROWS(gradient_concentration_check(noisy, 100, 19, 0.05, Seed(1)));
}

TEST_CASE("support stability experiment") {
    const GroundTruth truth = gen_ground_truth(40, ScaledFixed{4, 5.0}, 0.0, ModelKind::Linear, Seed(1).child("truth"));
    IhtParams params;
    params.k = 4;
    StabilityOptions self;
    self.replace_with_self = true;
    self.eval_samples = 500;
    const StabilityReport same = support_stability_experiment(truth, 80, params, 5, Seed(2), self);
    CHECK(same.support_agreement_rate == 1.0);
    CHECK(same.max_loss_discrepancy == 0.0);
    CHECK(same.n_trials == 5);
    CHECK(same.ht_margins.size() == 5);

    StabilityOptions fresh;
    fresh.eval_samples = 500;
    const StabilityReport noiseless = support_stability_experiment(truth, 80, params, 5, Seed(2), fresh);
    CHECK(noiseless.support_agreement_rate == 1.0);
    CHECK(noiseless.max_loss_discrepancy <= 1e-12);
    CHECK_THROWS(support_stability_experiment(truth, 80, params, 0, Seed(2), fresh));
}

TEST_CASE("IHT stability certificate") {
    std::mt19937_64 gen(23);
    DenseVector w_bar = DenseVector::Zero(30);
    w_bar.head(5) = oracle::gaussian_vector(gen, 5);
    IhtParams params;
    params.k = 5;
    params.step_size = 0.5;
    params.max_iters = 50;
    params.grad_tol = 0.0;
    const auto cert = iht_stability_certificate(GroundTruth(w_bar, 1.0), params);
    CHECK(cert.epsilon_k == doctest::Approx(0.5 * smallest_nonzero_magnitude(w_bar)).epsilon(1e-12));
    const auto doubled = iht_stability_certificate(GroundTruth(2 * w_bar, 1.0), params);
    CHECK(doubled.epsilon_k == doctest::Approx(2 * cert.epsilon_k).epsilon(1e-12));
    CHECK(doubled.required_sample_size(1, 1, 1, 30, 50, 0.05) ==
          doctest::Approx(cert.required_sample_size(1, 1, 1, 30, 50, 0.05) / 4).epsilon(1e-12));
    CHECK(cert.required_sample_size(2, 1, 1, 30, 50, 0.05) ==
          doctest::Approx(2 * 4 * 4 * std::log(30 * 50 / 0.05) / (cert.epsilon_k * cert.epsilon_k)).epsilon(1e-12));

    DenseVector tied = DenseVector::Zero(6);
    tied.head(3).setOnes();
    params.k = 2;
    const auto flat = iht_stability_certificate(GroundTruth(tied, 1.0), params);
    CHECK(flat.epsilon_k == 0.0);
    CHECK(flat.required_sample_size(1, 1, 1, 6, 50, 0.05) == std::numeric_limits<double>::infinity());
}
