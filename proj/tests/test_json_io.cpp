#include "nskey/json_io.hpp"

#include "doctest.h"
#include "nskey/polytope.hpp"
#include "nskey/squash.hpp"

using namespace nskey;

TEST_CASE("rational literals") {
    CHECK(rat_from_string("0.375") == Rat(3, 8));
    CHECK(rat_from_string("3/8") == Rat(3, 8));
    CHECK(rat_from_string("-1.25e-2") == Rat(-1, 80));
    CHECK(rat_from_string("2") == Rat(2));
    CHECK(rat_from_string(" 1/3 ") == Rat(1, 3));
    CHECK_THROWS(rat_from_string("abc"));
    CHECK_THROWS(rat_from_string(""));

    CHECK(rat_to_string(Rat(3, 8)) == "0.375");
    CHECK(rat_to_string(Rat(1, 3)) == "1/3");
    CHECK(rat_to_string(Rat(-1, 2)) == "-0.5");
    CHECK(rat_to_string(Rat(7)) == "7");
    CHECK(rat_from_string(rat_to_string(Rat(19, 4800))) == Rat(19, 4800));
}

TEST_CASE("device json round trip") {
    auto hrw = make_hrw({Rat(3, 100), Rat(-7, 100)});
    auto j = device_to_json(hrw);
    auto back = device_from_json(j);
    CHECK(back.probabilities == hrw.probabilities);
    CHECK(back.input_sizes == hrw.input_sizes);

    SUBCASE("plain numbers parse through their decimal form") {
        nlohmann::json num = device_to_json(make_pr<Rat>(), /*exact=*/false);
        auto dev = device_from_json(num);
        CHECK(dev.probabilities == make_pr<Rat>().probabilities);
    }

    SUBCASE("denormalized devices are rejected on load") {
        auto bad = device_to_json(hrw);
        bad["probabilities"][0][0][0][0] = "0.9";
        CHECK_THROWS(device_from_json(bad));
    }

    SUBCASE("negative entries are rejected") {
        auto bad = device_to_json(hrw);
        bad["probabilities"][0][0][0][0] = "-0.1";
        CHECK_THROWS(device_from_json(bad));
    }

    SUBCASE("shape mismatches are rejected") {
        auto bad = device_to_json(hrw);
        bad["probabilities"][0][0][0] = nlohmann::json::array({"0.5"});
        CHECK_THROWS(device_from_json(bad));
    }
}

TEST_CASE("ccd json round trip") {
    CcdState<Rat> s(2, 2, 1, 2, 2);
    s.at(0, 0, 0, 0, 0) = Rat(1, 2);
    s.at(1, 1, 0, 1, 0) = Rat(1, 2);
    s.at(0, 0, 0, 1, 1) = Rat(1, 2);
    s.at(1, 1, 0, 0, 1) = Rat(1, 2);
    auto j = ccd_to_json(s);
    auto back = ccd_from_json(j);
    CHECK(back.p == s.p);
    CHECK(back.sa == 2);
    CHECK(back.z == 2);

    auto bad = j;
    bad["probabilities"][0][0][0][0][0] = "0.75";
    CHECK_THROWS(ccd_from_json(bad));
}

TEST_CASE("complete extension dump uses vertex labels") {
    std::vector<Device<Rat>> vertices;
    for (const auto& v : chsh_vertices()) vertices.push_back(v.device);
    auto ce = build_complete_extension(make_pr<Rat>(), vertices);
    auto j = ce_to_json(ce);
    CHECK(j["z_size"] == 1);
    CHECK(j["ensembles"][0]["support"][0] == "B000");
    CHECK(j["ensembles"][0]["weights"][0] == "1");
    auto parent = device_from_json(j["parent"]);
    CHECK(parent.probabilities == make_pr<Rat>().probabilities);
}
