#include "nskey/device.hpp"

#include <random>
#include <set>

#include "doctest.h"
#include "nskey/polytope.hpp"
#include "test_support.hpp"

using namespace nskey;

TEST_CASE("validation accepts the PR box and rejects signaling") {
    auto pr = make_pr<Rat>();
    auto report = validate(pr);
    CHECK(report.normalized);
    CHECK(report.nonsignaling);
    CHECK(report.worst_violation == 0.0);

    // Bob's output copies Alice's input: signaling by construction.
    Device<Rat> sig({2, 2}, {2, 2});
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) sig.at({x, y}, {0, x}) = Rat(1);
    auto bad = validate(sig);
    CHECK(bad.normalized);
    CHECK_FALSE(bad.nonsignaling);
    CHECK(bad.worst_violation > 0.5);
}

TEST_CASE("hrw family stays valid across its parameter range") {
    auto box = make_hrw({Rat(1, 100), Rat(19, 100)});
    auto report = validate(box);
    CHECK(report.normalized);
    CHECK(report.nonsignaling);

    CHECK_THROWS(make_hrw({Rat(-1, 10), Rat(0)}));
    CHECK_THROWS(make_hrw({Rat(0), Rat(4, 5)}));
}

TEST_CASE("direct measurement slices") {
    auto pr = make_pr<Rat>();
    auto d = direct_measure(pr, {{0, 0}});
    CHECK(d.at({0, 0}) == Rat(1, 2));
    CHECK(d.at({1, 1}) == Rat(1, 2));
    CHECK(d.at({0, 1}) == Rat(0));

    auto l = make_local_vertex<Rat>(0, 0, 0, 0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            auto m = direct_measure(l, {{x, y}});
            CHECK(m.at({0, 0}) == Rat(1));
        }

    auto iso = make_isotropic<Rat>(Rat(1, 5));
    auto m = direct_measure(iso, {{0, 0}});
    CHECK(m.at({0, 0}) == Rat(2, 5));
    CHECK(m.at({1, 1}) == Rat(2, 5));
    CHECK(m.at({0, 1}) == Rat(1, 10));
    CHECK(m.at({1, 0}) == Rat(1, 10));

    CHECK_THROWS(direct_measure(pr, {{2, 0}}));
}

TEST_CASE("general measurement mixes direct ones") {
    auto pr = make_pr<Rat>();

    SUBCASE("deterministic dice restricts the input") {
        Channel<Rat> dice(1, 2);
        dice(0, 0) = Rat(1);
        auto restricted = general_measure(pr, 0, {dice});
        CHECK(restricted.input_sizes[0] == 1);
        CHECK(restricted.at({0, 1}, {0, 0}) == pr.at({0, 1}, {0, 0}));
    }

    SUBCASE("identity dice is a no-op") {
        auto same = general_measure(pr, 0, {Channel<Rat>::identity(2)});
        CHECK(same.probabilities == pr.probabilities);
    }

    SUBCASE("uniform dice averages the conditionals") {
        Channel<Rat> dice(1, 2);
        dice(0, 0) = Rat(1, 2);
        dice(1, 0) = Rat(1, 2);
        auto avg = general_measure(pr, 0, {dice});
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    CHECK(avg.at({0, y}, {a, b}) ==
                          (pr.at({0, y}, {a, b}) + pr.at({1, y}, {a, b})) / 2);
    }

    SUBCASE("measurement then slicing equals the dice average of slices") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            auto dev = testing::random_ns_device(rng);
            Channel<Rat> dice(2, 2);
            for (int in = 0; in < 2; ++in) {
                auto w = testing::random_rational_weights(rng, 2);
                dice(0, in) = w[0];
                dice(1, in) = w[1];
            }
            auto measured = general_measure(dev, 1, {dice});
            for (int zp = 0; zp < 2; ++zp)
                for (int x = 0; x < 2; ++x) {
                    auto lhs = direct_measure(measured, {{x, zp}});
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) {
                            Rat rhs = dice(0, zp) * direct_measure(dev, {{x, 0}}).at({a, b}) +
                                      dice(1, zp) * direct_measure(dev, {{x, 1}}).at({a, b});
                            CHECK(lhs.at({a, b}) == rhs);
                        }
                }
        }
    }
}

TEST_CASE("tensor products") {
    auto pr = make_pr<Rat>();

    SUBCASE("product with a trivial box is isomorphic to the original") {
        Device<Rat> trivial({1}, {1});
        trivial.at({0}, {0}) = Rat(1);
        auto prod = tensor_product(pr, trivial);
        CHECK(prod.parties == 3);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        CHECK(prod.at({x, y, 0}, {a, b, 0}) == pr.at({x, y}, {a, b}));
    }

    SUBCASE("pr times pr has product probabilities") {
        auto prod = tensor_product(pr, pr);
        CHECK(prod.parties == 4);
        CHECK(prod.at({0, 0, 0, 0}, {0, 0, 1, 1}) == Rat(1, 4));
        CHECK(validate(prod).ok());
    }

    SUBCASE("measurements factorize on random pairs") {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 10; ++trial) {
            auto d1 = testing::random_ns_device(rng);
            auto d2 = testing::random_ns_device(rng);
            auto prod = tensor_product(d1, d2);
            CHECK(validate(prod).ok());
            auto joint = direct_measure(prod, {{1, 0, 0, 1}});
            auto m1 = direct_measure(d1, {{1, 0}});
            auto m2 = direct_measure(d2, {{0, 1}});
            for (int a1 = 0; a1 < 2; ++a1)
                for (int b1 = 0; b1 < 2; ++b1)
                    for (int a2 = 0; a2 < 2; ++a2)
                        for (int b2 = 0; b2 < 2; ++b2)
                            CHECK(joint.at({a1, b1, a2, b2}) ==
                                  m1.at({a1, b1}) * m2.at({a2, b2}));
        }
    }
}

TEST_CASE("vertex families") {
    SUBCASE("24 distinct vertices, all exactly valid") {
        std::set<std::vector<Rat>> locals, nonlocals;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int g = 0; g < 2; ++g)
                    for (int s = 0; s < 2; ++s) {
                        auto v = make_local_vertex<Rat>(a, b, g, s);
                        auto rep = validate(v);
                        CHECK(rep.ok());
                        CHECK(rep.worst_violation == 0.0);
                        locals.insert(v.probabilities);
                    }
        for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t) {
                    auto v = make_nonlocal_vertex<Rat>(r, s, t);
                    auto rep = validate(v);
                    CHECK(rep.ok());
                    CHECK(rep.worst_violation == 0.0);
                    nonlocals.insert(v.probabilities);
                }
        CHECK(locals.size() == 16);
        CHECK(nonlocals.size() == 8);
    }

    SUBCASE("isotropic devices sit inside the hrw family") {
        CHECK(make_isotropic<Rat>(Rat(0)).probabilities == make_pr<Rat>().probabilities);
        for (long k : {0L, 7L, 50L, 100L}) {
            Rat eps = make_rat(k, 200);
            auto iso = make_isotropic<Rat>(eps);
            Rat ep = eps - Rat(1, 4);
            auto hrw = make_hrw({eps, ep});
            CHECK(iso.probabilities == hrw.probabilities);
        }
    }
}

TEST_CASE("chsh error") {
    CHECK(chsh_error(make_pr<Rat>()) == Rat(0));
    CHECK(chsh_error(make_anti_pr<Rat>()) == Rat(1));

    // Closed form (3/4 + delta + 3 eps_p) / 4 across the family.
    for (auto [dn, en] : {std::pair{1L, 3L}, {5L, -10L}, {40L, 2L}}) {
        Rat delta = make_rat(dn, 100), ep = make_rat(en, 100);
        CHECK(chsh_error(make_hrw({delta, ep})) == (Rat(3, 4) + delta + 3 * ep) / 4);
    }

    SUBCASE("affine under mixtures") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 30; ++trial) {
            auto p = testing::random_ns_device(rng);
            auto q = testing::random_ns_device(rng);
            Rat lambda = make_rat(std::uniform_int_distribution<long>(0, 100)(rng), 100);
            CHECK(chsh_error(mix(lambda, p, q)) ==
                  lambda * chsh_error(p) + (1 - lambda) * chsh_error(q));
        }
    }
}

TEST_CASE("output processing merges outcomes") {
    auto pr = make_pr<Rat>();
    auto merged = process_outputs(pr, 0, {0, 0}, 1);
    CHECK(merged.output_sizes[0] == 1);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int b = 0; b < 2; ++b) CHECK(merged.at({x, y}, {0, b}) == Rat(1, 2));
}
