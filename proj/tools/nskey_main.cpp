// Command-line surface for the non-signaling key-bound toolkit.
//
// Exit codes: 0 success, 1 domain violation, 2 I/O or parse error,
// 3 enumeration budget exceeded.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nskey/json_io.hpp"
#include "nskey/polytope.hpp"
#include "nskey/squash.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;

struct GridSpec {
    nskey::Rat lo, hi, step;
};

GridSpec parse_grid(const std::string& spec) {
    auto first = spec.find(':');
    auto second = spec.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw std::invalid_argument("grid must be lo:hi:step");
    GridSpec g{nskey::rat_from_string(spec.substr(0, first)),
               nskey::rat_from_string(spec.substr(first + 1, second - first - 1)),
               nskey::rat_from_string(spec.substr(second + 1))};
    if (g.step <= 0 || g.hi < g.lo)
        throw std::invalid_argument("grid must be lo:hi:step with step > 0");
    return g;
}

std::vector<nskey::Rat> expand_grid(const GridSpec& g) {
    std::vector<nskey::Rat> out;
    for (nskey::Rat v = g.lo; v <= g.hi; v += g.step) out.push_back(v);
    return out;
}

nskey::Device<nskey::Rat> load_device(const std::string& path) {
    return nskey::device_from_json(nlohmann::json::parse(nskey::read_file(path)));
}

// Reads an external lower-bound CSV (param,value) and matches it onto the
// grid; unmatched points carry NaN.
std::vector<double> load_overlay(const std::string& path, const std::vector<double>& grid) {
    std::istringstream in(nskey::read_file(path));
    std::map<double, double> table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        bool numeric = line.find_first_not_of("0123456789.,-+eE \t\r") == std::string::npos;
        if (first && !numeric) {
            first = false;
            continue;  // header
        }
        first = false;
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        table[std::stod(line.substr(0, comma))] = std::stod(line.substr(comma + 1));
    }
    std::vector<double> overlay(grid.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto it = table.lower_bound(grid[i] - 1e-9);
        if (it != table.end() && std::abs(it->first - grid[i]) <= 1e-9) overlay[i] = it->second;
    }
    return overlay;
}

int cmd_validate(const std::string& device_path) {
    auto device = load_device(device_path);
    auto report = nskey::validate(device);
    nlohmann::json out;
    out["normalized"] = report.normalized;
    out["nonsignaling"] = report.nonsignaling;
    out["worst_violation"] = report.worst_violation;
    out["valid"] = report.ok();
    std::cout << out.dump(2) << "\n";
    return report.ok() ? kExitOk : kExitDomain;
}

int cmd_bound(const std::string& family_name, const std::string& device_path,
              const std::string& grid_spec, const std::string& out_path,
              const std::string& overlay_path, const std::string& gnuplot_path,
              const nskey::NsqOptions& opts) {
    nskey::BoundCurve curve;
    nlohmann::json summary;

    if (!family_name.empty()) {
        auto fam = nskey::family_from_string(family_name);
        std::vector<nskey::Rat> grid;
        try {
            grid = expand_grid(parse_grid(grid_spec));
        } catch (const std::invalid_argument& e) {
            // Malformed grid strings are parse errors, not domain errors.
            throw std::runtime_error(e.what());
        }
        curve = nskey::compute_bound_curve(fam, grid, opts);
        summary["family"] = family_name;
    } else {
        auto device = load_device(device_path);
        auto report = nskey::validate(device);
        if (!report.ok()) {
            std::cerr << "device failed validation (violation " << report.worst_violation
                      << ")\n";
            return kExitDomain;
        }
        auto bound = nskey::device_bound(device, opts, device_path);
        curve.param_name = "chsh_error";
        curve.grid = {nskey::to_double(nskey::chsh_error(device))};
        curve.i_ab = {bound.i_ab};
        curve.i_ab_e_direct = {bound.i_ab_e_direct};
        curve.i_ab_e_channel = {bound.i_ab_e_channel};
        curve.n_c = {bound.n_c};
        curve.nsq_upper = {bound.nsq_upper};
        curve.certified = {bound.certified_zero};
        nskey::lower_convex_hull(curve);
        summary["device"] = device_path;
    }

    if (!overlay_path.empty()) curve.overlay = load_overlay(overlay_path, curve.grid);

    nskey::write_file(out_path, nskey::curve_to_csv(curve));
    if (!gnuplot_path.empty())
        nskey::write_file(gnuplot_path, nskey::curve_to_gnuplot(curve, out_path));

    auto& points = summary["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        points.push_back({{"param", curve.grid[i]},
                          {"nsq_upper", curve.nsq_upper[i]},
                          {"lch", curve.lch[i]},
                          {"certified_zero", static_cast<bool>(curve.certified[i])}});
    }
    summary["csv"] = out_path;
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_ce(const std::string& device_path, const std::string& out_path, long budget,
           const std::string& resume_path, const std::string& checkpoint_path) {
    auto device = load_device(device_path);
    auto report = nskey::validate(device);
    if (!report.ok()) {
        std::cerr << "device failed validation\n";
        return kExitDomain;
    }

    std::vector<nskey::Device<nskey::Rat>> vertices;
    for (const auto& v : nskey::chsh_vertices()) vertices.push_back(v.device);

    nskey::EnumerationOptions opts;
    opts.budget = budget;
    if (!resume_path.empty()) opts.resume = nskey::read_file(resume_path);
    auto enumeration = nskey::enumerate_minimal_ensembles(device, vertices, opts);

    nskey::CompleteExtension ce;
    ce.parent = device;
    ce.vertices = vertices;
    ce.ensembles = enumeration.ensembles;
    for (const auto& e : ce.ensembles)
        ce.e_alphabet = std::max(ce.e_alphabet, static_cast<int>(e.support.size()));

    auto j = nskey::ce_to_json(ce);
    j["complete"] = enumeration.complete;
    j["scanned_candidates"] = enumeration.scanned;
    j["total_candidates"] = enumeration.total_candidates;
    nskey::write_file(out_path, j.dump(2));

    nlohmann::json summary;
    summary["z_size"] = ce.z_size();
    summary["e_alphabet"] = ce.e_alphabet;
    summary["complete"] = enumeration.complete;
    summary["scanned_candidates"] = enumeration.scanned;
    summary["total_candidates"] = enumeration.total_candidates;
    summary["reference_z_size"] = 354;  // largest census on the isotropic line
    std::cout << summary.dump(2) << "\n";

    if (!enumeration.complete) {
        std::string cp = checkpoint_path.empty() ? out_path + ".checkpoint" : checkpoint_path;
        nskey::write_file(cp, enumeration.checkpoint);
        std::cerr << "budget exceeded, checkpoint written to " << cp << "\n";
        return kExitBudget;
    }
    return kExitOk;
}

int cmd_security(const std::string& ccd_path, double p_abort) {
    auto state = nskey::ccd_from_json(nlohmann::json::parse(nskey::read_file(ccd_path)));
    auto check = nskey::validate(state);
    if (!check.ok()) {
        std::cerr << "cc-d state failed validation (violation " << check.worst_violation
                  << ")\n";
        return kExitDomain;
    }
    auto rep = nskey::security_report(state, p_abort);
    nlohmann::json out;
    out["eps_secrecy"] = rep.eps_secrecy;
    out["eps_correctness"] = rep.eps_correctness;
    out["eps_security"] = rep.eps_security;
    out["p_abort"] = rep.p_abort;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_norm(const std::string& a_path, const std::string& b_path) {
    auto a = nskey::ccd_from_json(nlohmann::json::parse(nskey::read_file(a_path)));
    auto b = nskey::ccd_from_json(nlohmann::json::parse(nskey::read_file(b_path)));
    auto value = nskey::ns_norm_ccd(a, b);
    nlohmann::json out;
    out["ns_norm"] = nskey::to_double(value);
    out["ns_norm_exact"] = nskey::rat_to_string(value);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_fraction(const std::string& device_path) {
    auto device = load_device(device_path);
    auto report = nskey::validate(device);
    if (!report.ok()) {
        std::cerr << "device failed validation\n";
        return kExitDomain;
    }
    auto res = nskey::nonlocality_fraction(device);
    nlohmann::json out;
    out["fraction"] = nskey::to_double(res.fraction);
    out["fraction_exact"] = nskey::rat_to_string(res.fraction);
    out["nonlocality_cost"] = nskey::nonlocality_cost(device);
    auto& witness = out["witness"] = nlohmann::json::array();
    for (std::size_t i = 0; i < res.witness.vertex_ids.size(); ++i)
        witness.push_back({{"vertex", nskey::chsh_vertices()[res.witness.vertex_ids[i]].label},
                           {"weight", nskey::rat_to_string(res.witness.weights[i])}});
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-signaling device-independent key bounds"};
    app.require_subcommand(1);

    // NSDI_THREADS caps internal parallelism; the pipelines currently run
    // sequentially, so the cap is validated and any positive value accepted.
    if (const char* threads = std::getenv("NSDI_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(threads, &end, 10);
        if (end == threads || *end != '\0' || v < 1) {
            std::cerr << "NSDI_THREADS must be a positive integer\n";
            return kExitParse;
        }
    }

    nskey::NsqOptions nsq_opts;

    auto* validate_cmd = app.add_subcommand("validate", "Check a device JSON file");
    std::string validate_device;
    validate_cmd->add_option("device", validate_device, "device JSON path")->required();

    auto* bound_cmd = app.add_subcommand("bound", "Compute key-rate upper-bound curves");
    std::string bound_family, bound_device, bound_grid = "0:0.25:0.005";
    std::string bound_out = "bound.csv", bound_overlay, bound_gnuplot;
    bound_cmd->add_option("--family", bound_family, "iso|hrw-a|hrw-b|hrw-c|hrw-d");
    bound_cmd->add_option("--device", bound_device, "device JSON path");
    bound_cmd->add_option("--grid", bound_grid, "lo:hi:step over the CHSH error");
    bound_cmd->add_option("--out", bound_out, "output CSV path");
    bound_cmd->add_option("--overlay", bound_overlay, "external lower-bound CSV to copy through");
    bound_cmd->add_option("--gnuplot", bound_gnuplot, "write a gnuplot script here");
    bound_cmd->add_option("--seed", nsq_opts.seed, "seed for all stochastic searches");
    bound_cmd->add_option("--restarts", nsq_opts.restarts, "channel-search restarts per input");
    bound_cmd->add_option("--max-evals", nsq_opts.max_evals, "evaluations per restart");

    auto* ce_cmd = app.add_subcommand("ce", "Enumerate minimal ensembles / complete extension");
    std::string ce_device, ce_out = "ensembles.json", ce_resume, ce_checkpoint;
    long ce_budget = -1;
    ce_cmd->add_option("--device", ce_device, "device JSON path")->required();
    ce_cmd->add_option("--out", ce_out, "output JSON path");
    ce_cmd->add_option("--budget", ce_budget, "candidate scan budget");
    ce_cmd->add_option("--resume", ce_resume, "checkpoint file to resume from");
    ce_cmd->add_option("--checkpoint", ce_checkpoint, "checkpoint output path");

    auto* security_cmd = app.add_subcommand("security", "Security report for a cc-d state");
    std::string sec_ccd;
    double sec_p_abort = 0.0;
    security_cmd->add_option("--ccd", sec_ccd, "cc-d state JSON path")->required();
    security_cmd->add_option("--p-abort", sec_p_abort, "abort probability");

    auto* norm_cmd = app.add_subcommand("norm", "NS norm between two cc-d states");
    std::string norm_a, norm_b;
    norm_cmd->add_option("--a", norm_a, "first cc-d JSON path")->required();
    norm_cmd->add_option("--b", norm_b, "second cc-d JSON path")->required();

    auto* fraction_cmd = app.add_subcommand("fraction", "Non-locality fraction of a device");
    std::string frac_device;
    fraction_cmd->add_option("--device", frac_device, "device JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) return cmd_validate(validate_device);
        if (bound_cmd->parsed()) {
            if (bound_family.empty() == bound_device.empty()) {
                std::cerr << "exactly one of --family / --device is required\n";
                return kExitParse;
            }
            return cmd_bound(bound_family, bound_device, bound_grid, bound_out, bound_overlay,
                             bound_gnuplot, nsq_opts);
        }
        if (ce_cmd->parsed()) return cmd_ce(ce_device, ce_out, ce_budget, ce_resume, ce_checkpoint);
        if (security_cmd->parsed()) return cmd_security(sec_ccd, sec_p_abort);
        if (norm_cmd->parsed()) return cmd_norm(norm_a, norm_b);
        if (fraction_cmd->parsed()) return cmd_fraction(frac_device);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitParse;
}
