// Acceptance suite: one line per criterion, nonzero exit on any failure.
// argv[1] must point at the CLI binary (used by criterion 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "nskey/json_io.hpp"
#include "nskey/lp.hpp"
#include "nskey/norms.hpp"
#include "nskey/polytope.hpp"
#include "nskey/squash.hpp"

using namespace nskey;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

struct Criterion {
    int id;
    std::string label;
    Clock::time_point start = Clock::now();
    double budget_seconds;
    bool ok = true;
    std::string detail;

    Criterion(int id_, std::string label_, double budget)
        : id(id_), label(std::move(label_)), budget_seconds(budget) {}

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }

    void finish() {
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (secs > budget_seconds && ok) {
            ok = false;
            detail = "runtime " + std::to_string(secs) + "s exceeds budget";
        }
        std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id,
                    label.c_str(), secs, ok ? "" : " -- ", ok ? "" : detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

std::vector<Device<Rat>> vertex_devices() {
    std::vector<Device<Rat>> out;
    for (const auto& v : chsh_vertices()) out.push_back(v.device);
    return out;
}

CompleteExtension partial_extension(const Device<Rat>& device,
                                    const std::vector<Device<Rat>>& vertices, long max_found) {
    EnumerationOptions opts;
    opts.max_ensembles = max_found;
    auto res = enumerate_minimal_ensembles(device, vertices, opts);
    CompleteExtension ce;
    ce.parent = device;
    ce.vertices = vertices;
    ce.ensembles = std::move(res.ensembles);
    for (const auto& e : ce.ensembles)
        ce.e_alphabet = std::max(ce.e_alphabet, static_cast<int>(e.support.size()));
    return ce;
}

std::vector<Rat> rational_weights(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<long> u(1, 997);
    std::vector<long> nums(n);
    long total = 0;
    for (long& v : nums) total += (v = u(rng));
    std::vector<Rat> w(n);
    for (int i = 0; i < n; ++i) w[i] = make_rat(nums[i], total);
    return w;
}

// Half the samples are pulled toward a nonlocal vertex; plain mixtures of
// all 24 vertices land almost surely inside the local polytope.
Device<Rat> random_ns_device(std::mt19937_64& rng) {
    auto w = rational_weights(rng, 24);
    Device<Rat> d({2, 2}, {2, 2});
    const auto& vs = chsh_vertices();
    for (int i = 0; i < 24; ++i)
        for (std::size_t k = 0; k < d.probabilities.size(); ++k)
            d.probabilities[k] += w[i] * vs[i].device.probabilities[k];
    if (std::uniform_int_distribution<int>(0, 1)(rng)) {
        int v = std::uniform_int_distribution<int>(16, 23)(rng);
        Rat lambda = make_rat(std::uniform_int_distribution<long>(40, 95)(rng), 100);
        d = mix(lambda, vs[v].device, d);
    }
    return d;
}

CcdState<Rat> random_ccd(std::mt19937_64& rng, int e, int z) {
    CcdState<Rat> s(2, 2, 2, e, z);
    auto base = rational_weights(rng, 8);
    int idx = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int qq = 0; qq < 2; ++qq) {
                for (int zz = 0; zz < z; ++zz) {
                    auto split = rational_weights(rng, e);
                    for (int ee = 0; ee < e; ++ee) s.at(a, b, qq, ee, zz) = base[idx] * split[ee];
                }
                ++idx;
            }
    return s;
}

// ---- criterion 1: the zero-key region through the CLI -------------------

void criterion_1(const std::string& cli) {
    Criterion c(1, "isotropic zero-key region via cmd_bound", 120.0);
    std::string dir = "acceptance_tmp";
    if (std::system(("mkdir -p " + dir).c_str()) != 0) {
        c.require(false, "cannot create scratch directory");
        c.finish();
        return;
    }
    std::string csv = dir + "/iso.csv";
    std::string log = dir + "/iso.json";
    std::string cmd = cli + " bound --family iso --grid 0:0.25:0.005 --out " + csv + " > " + log;
    int rc = std::system(cmd.c_str());
    c.require(rc == 0, "cmd_bound exited with " + std::to_string(rc));

    if (c.ok) {
        auto summary = nlohmann::json::parse(read_file(log));
        std::ifstream in(csv);
        std::string line;
        std::getline(in, line);
        c.require(line == "param,I_AB,I_ABgE_direct,I_ABgE_channel,N_C,nsq_upper,lch",
                  "unexpected CSV header: " + line);
        int rows = 0;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::vector<double> cols;
            std::string cell;
            while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
            double eps = cols[0], lch = cols[6];
            bool certified = summary["points"][rows]["certified_zero"].get<bool>();
            if (eps >= 0.2 - 1e-12) {
                c.require(std::abs(lch) <= 1e-9,
                          "lch not zero at eps=" + std::to_string(eps));
                c.require(certified, "no certificate at eps=" + std::to_string(eps));
            } else if (eps <= 0.19 + 1e-12) {
                c.require(lch > 1e-3, "lch too small at eps=" + std::to_string(eps));
            }
            ++rows;
        }
        c.require(rows == 51, "expected 51 grid rows, got " + std::to_string(rows));
    }
    c.finish();
}

// ---- criterion 2: the closed-form non-locality fraction ------------------

void criterion_2() {
    Criterion c(2, "hrw non-locality fraction formula on 100 random points", 30.0);
    std::mt19937_64 rng(20260809);
    std::uniform_int_distribution<long> d100(0, 99);
    for (int t = 0; t < 100 && c.ok; ++t) {
        Rat delta = make_rat(d100(rng), 100);
        Rat q = make_rat(d100(rng), 100);
        Rat span = (1 - delta) / 3;
        Rat ep = -Rat(1, 4) + q * span;
        auto box = make_hrw({delta, ep});
        Rat expected = Rat(1, 4) - delta - 3 * ep;
        Rat got = nonlocality_fraction(box).fraction;
        c.require(got == expected, "fraction mismatch at delta=" + rat_to_string(delta) +
                                       " ep=" + rat_to_string(ep));
        c.require(std::abs(to_double(got - expected)) <= 1e-8, "fraction tolerance");
    }
    c.finish();
}

// ---- criterion 3: the nine-vertex minimal ensemble -----------------------

void criterion_3() {
    Criterion c(3, "nine-vertex hrw ensemble weights and minimality", 5.0);
    const Rat delta(7, 100), ep(-3, 100);
    auto box = make_hrw({delta, ep});

    std::vector<std::vector<Rat>> gens;
    for (int id : hrw_support_vertex_ids())
        gens.push_back(chsh_vertices()[id].device.probabilities);
    auto w = convex_combination_on_support(box.probabilities, gens);
    c.require(w.has_value(), "support infeasible");
    if (w) {
        const Rat member = (1 + 4 * ep) / 8;
        c.require((*w)[0] == Rat(1, 4) - delta - 3 * ep, "nonlocal weight");
        for (int i = 1; i <= 6; ++i)
            c.require((*w)[i] == member, "local member weight " + std::to_string(i));
        c.require((*w)[7] == delta / 2 && (*w)[8] == delta / 2, "delta members");

        // Minimality: dropping any one member leaves no valid weights, and
        // feasibility of any proper subset would lift to one of these.
        for (std::size_t skip = 0; skip < gens.size() && c.ok; ++skip) {
            std::vector<std::vector<Rat>> sub;
            for (std::size_t i = 0; i < gens.size(); ++i)
                if (i != skip) sub.push_back(gens[i]);
            c.require(!convex_combination_on_support(box.probabilities, sub).has_value(),
                      "support is not minimal (drop " + std::to_string(skip) + ")");
        }
    }
    c.finish();
}

// ---- criterion 4: conditional mutual information equals the cost ---------

void criterion_4() {
    Criterion c(4, "squashed cmi equals 1-4eps on the isotropic grid", 600.0);
    auto vertices = vertex_devices();
    for (int k = 0; k <= 10 && c.ok; ++k) {
        Rat eps = make_rat(k, 40);  // 0 : 0.25 : 0.025
        auto dev = make_isotropic<Rat>(eps);
        auto ce = build_complete_extension(dev, vertices);
        auto cmi = squashed_cmi_over_ce(dev, ce);
        double expected = 1.0 - 4.0 * to_double(eps);
        c.require(std::abs(cmi.bits - expected) <= 1e-6,
                  "cmi=" + std::to_string(cmi.bits) + " at eps=" + rat_to_string(eps));
    }
    c.finish();
}

// ---- criterion 5: distinguisher oracle vs the closed form ----------------

void criterion_5() {
    Criterion c(5, "brute-force distinguisher matches the NS norm", 300.0);
    std::mt19937_64 rng(5150);
    for (int t = 0; t < 50 && c.ok; ++t) {
        int e = 2 + (t % 2), z = 1 + (t % 2);
        auto ra = random_ccd(rng, e, z);
        auto rb = random_ccd(rng, e, z);
        CcdState<double> a(2, 2, 2, e, z), b(2, 2, 2, e, z);
        for (std::size_t i = 0; i < ra.p.size(); ++i) {
            a.p[i] = to_double(ra.p[i]);
            b.p[i] = to_double(rb.p[i]);
        }
        double oracle = brute_force_distinguisher(a, b);
        double closed = to_double(ns_norm_ccd(ra, rb));
        c.require(oracle <= closed + 1e-12, "oracle exceeded the closed form");
        c.require(std::abs(oracle - closed) <= 1e-9, "oracle gap above 1e-9");
    }
    c.finish();
}

// ---- criterion 6: security equivalence -----------------------------------

void criterion_6() {
    Criterion c(6, "security/secrecy/correctness inequalities", 60.0);
    std::mt19937_64 rng(6006);
    for (int t = 0; t < 100 && c.ok; ++t) {
        auto real = random_ccd(rng, 3, 2);
        auto rep = security_report(real);
        double lo = std::max(rep.eps_secrecy, rep.eps_correctness);
        c.require(lo <= rep.eps_security + 1e-10, "max(sec,cor) above security");
        c.require(rep.eps_security <= rep.eps_secrecy + rep.eps_correctness + 1e-10,
                  "security above sec+cor");
        c.require(ns_norm_ccd(real, intermediate_state(real)) == prob_keys_differ(real),
                  "intermediate distance differs from P[S_A != S_B]");
    }
    c.finish();
}

// ---- criterion 7: hierarchy and subextensivity ---------------------------

void criterion_7() {
    Criterion c(7, "quantifier hierarchy on 200 random devices", 600.0);
    std::mt19937_64 rng(7007);
    auto vertices = vertex_devices();
    NsqOptions opts;
    opts.restarts = 2;
    opts.max_evals = 300;
    opts.refine_top_z = 1;
    for (int t = 0; t < 200 && c.ok; ++t) {
        auto dev = random_ns_device(rng);
        auto ce = partial_extension(dev, vertices, 32);
        if (ce.z_size() == 0) {
            c.require(false, "no ensemble found");
            break;
        }
        auto bound = nsq_upper_bound(dev, ce, {}, opts);
        double cap = std::min(bound.i_ab, bound.i_ab_e_channel);
        c.require(bound.nsq_upper <= cap + 1e-10, "hierarchy violated");
        c.require(bound.nsq_upper >= -1e-10, "negative bound");
        for (double v : {bound.i_ab, bound.i_ab_e_direct, bound.i_ab_e_channel, bound.nsq_upper})
            c.require(v <= 1.0 + 1e-10, "subextensivity violated");
    }
    c.finish();
}

// ---- criterion 8: additivity ----------------------------------------------

void criterion_8() {
    Criterion c(8, "squashed mutual information additivity on 50 pairs", 60.0);
    std::mt19937_64 rng(8008);
    for (int t = 0; t < 50 && c.ok; ++t) {
        auto p = random_ns_device(rng);
        auto q = random_ns_device(rng);
        double lhs = squashed_mutual_information(tensor_bipartite(p, q)).bits;
        double rhs = squashed_mutual_information(p).bits + squashed_mutual_information(q).bits;
        c.require(std::abs(lhs - rhs) <= 1e-10, "additivity gap " + std::to_string(lhs - rhs));
    }
    c.finish();
}

// ---- criterion 9: point checks --------------------------------------------

void criterion_9() {
    Criterion c(9, "PR box and local-vertex point values", 10.0);
    auto vertices = vertex_devices();

    auto pr = make_pr<Rat>();
    auto pr_ce = build_complete_extension(pr, vertices);
    NsqOptions opts;
    opts.restarts = 2;
    opts.max_evals = 300;
    auto pr_bound = nsq_upper_bound(pr, pr_ce, {}, opts);
    c.require(std::abs(pr_bound.i_ab - 1.0) <= 1e-12, "PR squashed MI");
    c.require(nonlocality_fraction(pr).fraction == Rat(1), "PR fraction");
    c.require(std::abs(pr_bound.n_c - 1.0) <= 1e-12, "PR cost");
    c.require(std::abs(pr_bound.nsq_upper - 1.0) <= 1e-9, "PR nsq upper");

    for (int i = 0; i < 16 && c.ok; ++i) {
        const auto& dev = chsh_vertices()[i].device;
        auto ce = partial_extension(dev, vertices, 1);
        auto bound = nsq_upper_bound(dev, ce, {}, opts);
        c.require(bound.i_ab <= 1e-12, "local vertex MI");
        c.require(nonlocality_fraction(dev).fraction == Rat(0), "local vertex fraction");
        c.require(bound.n_c <= 1e-12, "local vertex cost");
        c.require(bound.certified_zero && bound.nsq_upper == 0.0,
                  "local vertex not certified zero");
    }
    c.finish();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance_test <path-to-cli>\n";
        return 2;
    }
    criterion_1(argv[1]);
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (failures == 0) std::printf("all acceptance criteria passed\n");
    return failures == 0 ? 0 : 1;
}
