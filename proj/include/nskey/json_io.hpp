#ifndef NSKEY_JSON_IO_HPP
#define NSKEY_JSON_IO_HPP

#include <string>

#include "json.hpp"
#include "nskey/device.hpp"
#include "nskey/ensembles.hpp"
#include "nskey/norms.hpp"

namespace nskey {

// Devices are stored with nested probability arrays indexed
// [x_1]..[x_n][a_1]..[a_n]. Entries may be JSON numbers or strings;
// strings ("3/8", "0.375") parse exactly, numbers go through their shortest
// decimal representation. Writing with exact=true emits strings.
nlohmann::json device_to_json(const Device<Rat>& device, bool exact = true);
Device<Rat> device_from_json(const nlohmann::json& j);

// cc-d states carry a classical_vars section for S_A, S_B, Q and flat
// device-like e/z alphabets; probabilities nest as [s_a][s_b][q][e][z].
nlohmann::json ccd_to_json(const CcdState<Rat>& state, bool exact = true);
CcdState<Rat> ccd_from_json(const nlohmann::json& j);

// Complete-extension dump: parent device plus one entry per minimal
// ensemble with weights and vertex labels.
nlohmann::json ce_to_json(const CompleteExtension& ce);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace nskey

#endif
