#include <catch2/catch_amalgamated.hpp>

#include "petreg/graph.hpp"
#include "petreg/observer.hpp"

#include <cmath>

using namespace petreg;
using Catch::Approx;

namespace {
const Matrix kRot{{0, 1}, {-1, 0}};
}

TEST_CASE("prediction at the event time returns the held value", "[observer]") {
    BroadcastRecord rec{1.5, ColVec{0.3, -0.7}, kRot};
    ColVec p = predict_broadcast(rec, 1.5);
    CHECK(p(0) == 0.3);
    CHECK(p(1) == -0.7);
}

TEST_CASE("prediction rotates the held value", "[observer]") {
    BroadcastRecord rec{0.0, ColVec{1, 0}, kRot};
    ColVec p = predict_broadcast(rec, M_PI / 2);
    CHECK(p(0) == Approx(0.0).margin(1e-12));
    CHECK(p(1) == Approx(-1.0).margin(1e-12));
}

TEST_CASE("prediction before the event is a causality error", "[observer]") {
    BroadcastRecord rec{2.0, ColVec{1, 0}, kRot};
    CHECK_THROWS_AS(predict_broadcast(rec, 1.0), InputError);
}

TEST_CASE("case-1 rhs at consensus reduces to the drift", "[observer]") {
    ColVec nu_hat{0.4, 0.6};
    ColVec pred = nu_hat;
    ColVec rhs = observer_rhs_case1(kRot, nu_hat, pred, {pred, pred}, 2.0);
    ColVec drift = kRot * nu_hat;
    CHECK(rhs(0) == Approx(drift(0)));
    CHECK(rhs(1) == Approx(drift(1)));
}

TEST_CASE("case-1 rhs single pinned agent by substitution", "[observer]") {
    // nu_hat = 0, own prediction 0, leader at (1,0), mu2 = 2
    ColVec rhs = observer_rhs_case1(kRot, ColVec{0, 0}, ColVec{0, 0}, {ColVec{1, 0}}, 2.0);
    CHECK(rhs(0) == Approx(2.0));
    CHECK(rhs(1) == Approx(0.0));
}

TEST_CASE("case-1 rhs with zero coupling gain ignores neighbours", "[observer]") {
    ColVec nu_hat{1, 2};
    ColVec rhs = observer_rhs_case1(kRot, nu_hat, ColVec{5, 5}, {ColVec{-3, 9}}, 0.0);
    ColVec drift = kRot * nu_hat;
    CHECK(rhs(0) == drift(0));
    CHECK(rhs(1) == drift(1));
}

TEST_CASE("case-2 rhs at consensus", "[observer]") {
    Matrix a_held = kRot;
    ColVec nu_hat{0.5, 0.5};
    auto d = observer_rhs_case2(a_held, nu_hat, nu_hat, {nu_hat}, {a_held}, 2.0, 2.0);
    CHECK(d.a_hat_dot.max_abs() == 0.0);
    ColVec drift = a_held * nu_hat;
    CHECK(d.nu_hat_dot(0) == Approx(drift(0)));
    CHECK(d.nu_hat_dot(1) == Approx(drift(1)));
}

TEST_CASE("case-2 A-consensus pinned to the leader", "[observer]") {
    // A_held = 0, leader supplies the true A, mu1 = 2 => A_dot = 2 (A - 0)
    Matrix zero(2, 2);
    auto d = observer_rhs_case2(zero, ColVec{0, 0}, ColVec{0, 0}, {ColVec{1, 0}}, {kRot}, 2.0, 2.0);
    CHECK(d.a_hat_dot(0, 1) == Approx(2.0));
    CHECK(d.a_hat_dot(1, 0) == Approx(-2.0));
    CHECK(d.a_hat_dot(0, 0) == 0.0);
}

TEST_CASE("case-2 with exact A held reduces to case 1", "[observer]") {
    ColVec nu_hat{0.2, -0.1}, own{0.3, 0.0};
    std::vector<ColVec> preds{ColVec{1, 0}, ColVec{0.5, 0.5}};
    auto d = observer_rhs_case2(kRot, nu_hat, own, preds, {kRot, kRot}, 2.0, 2.0);
    ColVec c1 = observer_rhs_case1(kRot, nu_hat, own, preds, 2.0);
    CHECK(d.nu_hat_dot(0) == c1(0));
    CHECK(d.nu_hat_dot(1) == c1(1));
    CHECK(d.a_hat_dot.max_abs() == 0.0);
}

TEST_CASE("PETM-A threshold semantics", "[observer]") {
    ObserverParams p;
    p.iota_nu = 1.0;
    p.gamma_nu = 0.1;
    // deviation 0.5 at tau=0: below threshold
    CHECK_FALSE(petm_a_fire(ColVec{0.5, 0}, ColVec{0, 0}, 0.0, p));
    // deviation 1.5: above
    CHECK(petm_a_fire(ColVec{1.5, 0}, ColVec{0, 0}, 0.0, p));
    // deviation exactly at the threshold: strict inequality, no fire
    const Real tau = 3.0;
    const Real threshold = p.iota_nu * std::exp(-p.gamma_nu * tau);
    CHECK_FALSE(petm_a_fire(ColVec{threshold, 0}, ColVec{0, 0}, tau, p));
}

TEST_CASE("case-2 trigger fires on either condition", "[observer]") {
    ObserverParams p;
    p.iota_a = 0.5;
    p.gamma_a = 0.1;
    p.iota_nu = 0.5;
    p.gamma_nu = 0.1;
    Matrix small(2, 2);
    Matrix big(2, 2);
    big(0, 0) = 1.0;
    ColVec near{0.1, 0}, far{1.0, 0}, zero{0, 0};

    auto both_below = petm_case2_fire(small, small, near, zero, 0.0, p);
    CHECK_FALSE(both_below.fired());
    auto a_above = petm_case2_fire(big, small, near, zero, 0.0, p);
    CHECK(a_above.fired());
    CHECK(a_above.by_a);
    CHECK_FALSE(a_above.by_nu);
    auto both_above = petm_case2_fire(big, small, far, zero, 0.0, p);
    CHECK(both_above.by_a);
    CHECK(both_above.by_nu);
}

TEST_CASE("sampling bound scalar fixture", "[observer][bound]") {
    auto b = sampling_period_bound(1.0, 0.1, Matrix{{1}});
    CHECK(b.term_state == Approx(1.0 / 6 - 0.1 / 3).epsilon(1e-12));
    CHECK(b.term_delay == Approx(1.0 / 4.1).epsilon(1e-12));
    CHECK(b.value == Approx(0.1333333333).epsilon(1e-6));
    CHECK(b.feasible);
}

TEST_CASE("sampling bound grows as gamma shrinks", "[observer][bound]") {
    Matrix h = h_matrix(chain_graph(4));
    Real prev = -1e9;
    for (Real gamma : {0.5, 0.2, 0.1, 0.05, 0.01}) {
        auto b = sampling_period_bound(2.0, gamma, h);
        CHECK(b.value >= prev);
        prev = b.value;
    }
}

TEST_CASE("sampling bound collapses for large mu", "[observer][bound]") {
    Matrix h = h_matrix(chain_graph(4));
    auto small_mu = sampling_period_bound(1.0, 0.1, h);
    auto large_mu = sampling_period_bound(100.0, 0.1, h);
    CHECK(large_mu.value < small_mu.value);
    CHECK(large_mu.value < 1e-3);
}

TEST_CASE("bound for the default graph at the benchmark gains", "[observer][bound]") {
    Matrix h = h_matrix(chain_graph(4));
    auto b = sampling_period_bound(2.0, 0.2, h);
    CHECK(b.feasible);
    CHECK(b.value == Approx(0.005987).margin(2e-5));
    CHECK(0.005 < b.value);  // the tightened grid used by the convergence check
}
