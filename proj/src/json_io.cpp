#include "nskey/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nskey/polytope.hpp"

namespace nskey {

namespace {

Rat rat_from_json_value(const nlohmann::json& v) {
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    if (v.is_number_integer()) return Rat(v.get<long>());
    if (v.is_number_float()) {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.get<double>());
        if (ec != std::errc{}) throw std::invalid_argument("unprintable number");
        return rat_from_string(std::string(buf, end));
    }
    throw std::invalid_argument("probability entries must be numbers or strings");
}

nlohmann::json rat_to_json_value(const Rat& r, bool exact) {
    if (exact) return rat_to_string(r);
    return to_double(r);
}

// Recursively walks nested arrays in canonical index order.
void flatten_into(const nlohmann::json& node, const std::vector<int>& dims, std::size_t depth,
                  std::vector<Rat>& out) {
    if (depth == dims.size()) {
        out.push_back(rat_from_json_value(node));
        return;
    }
    if (!node.is_array() || static_cast<int>(node.size()) != dims[depth])
        throw std::invalid_argument("probability nesting does not match alphabet sizes");
    for (const auto& child : node) flatten_into(child, dims, depth + 1, out);
}

nlohmann::json nest_from(const std::vector<Rat>& flat, const std::vector<int>& dims,
                         std::size_t depth, std::size_t& cursor, bool exact) {
    if (depth == dims.size()) return rat_to_json_value(flat[cursor++], exact);
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < dims[depth]; ++i)
        arr.push_back(nest_from(flat, dims, depth + 1, cursor, exact));
    return arr;
}

}  // namespace

nlohmann::json device_to_json(const Device<Rat>& device, bool exact) {
    nlohmann::json j;
    j["input_sizes"] = device.input_sizes;
    j["output_sizes"] = device.output_sizes;
    std::vector<int> dims = device.input_sizes;
    dims.insert(dims.end(), device.output_sizes.begin(), device.output_sizes.end());
    std::size_t cursor = 0;
    j["probabilities"] = nest_from(device.probabilities, dims, 0, cursor, exact);
    return j;
}

Device<Rat> device_from_json(const nlohmann::json& j) {
    auto in = j.at("input_sizes").get<std::vector<int>>();
    auto out = j.at("output_sizes").get<std::vector<int>>();
    Device<Rat> device(in, out);
    std::vector<int> dims = in;
    dims.insert(dims.end(), out.begin(), out.end());
    std::vector<Rat> flat;
    flat.reserve(device.probabilities.size());
    flatten_into(j.at("probabilities"), dims, 0, flat);
    device.probabilities = std::move(flat);

    // Structural sanity on load; full non-signaling checks stay with
    // validate() so callers can report violations.
    const std::size_t n_out = device.total_outputs();
    for (std::size_t xi = 0; xi < device.total_inputs(); ++xi) {
        Rat sum{0};
        for (std::size_t ai = 0; ai < n_out; ++ai) {
            const Rat& p = device.probabilities[xi * n_out + ai];
            if (p < 0) throw std::invalid_argument("negative probability entry");
            sum += p;
        }
        if (std::abs(to_double(sum) - 1.0) > 1e-9)
            throw std::invalid_argument("conditional distribution is not normalized");
    }
    return device;
}

nlohmann::json ccd_to_json(const CcdState<Rat>& state, bool exact) {
    nlohmann::json j;
    j["classical_vars"] = {{"s_a", state.sa}, {"s_b", state.sb}, {"q", state.q}};
    j["e_size"] = state.e;
    j["z_size"] = state.z;
    std::vector<int> dims = {state.sa, state.sb, state.q, state.e, state.z};
    std::size_t cursor = 0;
    j["probabilities"] = nest_from(state.p, dims, 0, cursor, exact);
    return j;
}

CcdState<Rat> ccd_from_json(const nlohmann::json& j) {
    const auto& cv = j.at("classical_vars");
    CcdState<Rat> state(cv.at("s_a").get<int>(), cv.at("s_b").get<int>(), cv.at("q").get<int>(),
                        j.at("e_size").get<int>(), j.at("z_size").get<int>());
    std::vector<int> dims = {state.sa, state.sb, state.q, state.e, state.z};
    std::vector<Rat> flat;
    flat.reserve(state.p.size());
    flatten_into(j.at("probabilities"), dims, 0, flat);
    state.p = std::move(flat);

    for (int zz = 0; zz < state.z; ++zz) {
        Rat mass{0};
        for (int a = 0; a < state.sa; ++a)
            for (int b = 0; b < state.sb; ++b)
                for (int qq = 0; qq < state.q; ++qq)
                    for (int ee = 0; ee < state.e; ++ee) {
                        const Rat& v = state.at(a, b, qq, ee, zz);
                        if (v < 0) throw std::invalid_argument("negative probability entry");
                        mass += v;
                    }
        if (std::abs(to_double(mass) - 1.0) > 1e-9)
            throw std::invalid_argument("cc-d state is not normalized");
    }
    return state;
}

nlohmann::json ce_to_json(const CompleteExtension& ce) {
    nlohmann::json j;
    j["parent"] = device_to_json(ce.parent);
    j["e_alphabet"] = ce.e_alphabet;
    j["z_size"] = ce.z_size();

    // Use the canonical labels when the vertex list is the built-in one.
    bool canonical = ce.vertices.size() == chsh_vertices().size();
    if (canonical)
        for (std::size_t i = 0; i < ce.vertices.size(); ++i)
            if (ce.vertices[i].probabilities != chsh_vertices()[i].device.probabilities) {
                canonical = false;
                break;
            }

    auto& arr = j["ensembles"] = nlohmann::json::array();
    for (int z = 0; z < ce.z_size(); ++z) {
        const auto& ens = ce.ensembles[z];
        nlohmann::json e;
        e["z"] = z;
        auto& w = e["weights"] = nlohmann::json::array();
        for (const auto& wi : ens.weights) w.push_back(rat_to_string(wi));
        auto& s = e["support"] = nlohmann::json::array();
        for (int idx : ens.support)
            s.push_back(canonical ? chsh_vertices()[idx].label : "V" + std::to_string(idx));
        arr.push_back(std::move(e));
    }
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace nskey
