#include "fuseplan/arch.hpp"

#include <json.hpp>

namespace fuseplan {

namespace {
constexpr int64_t kKiB = 1024;
}

void ArchConfig::validate() const {
    auto require = [&](bool ok, const char* field) {
        if (!ok)
            throw ValidationError("arch '" + name + "': field '" + field + "' must be positive");
    };
    require(pe_x > 0, "pe_x");
    require(pe_y > 0, "pe_y");
    require(macs_per_pe > 0, "macs_per_pe");
    require(activation_buffer_bytes > 0, "activation_buffer_bytes");
    require(weight_buffer_bytes > 0, "weight_buffer_bytes");
    require(clock_hz > 0, "clock_hz");
    require(dram_bytes_per_sec > 0, "dram_bytes_per_sec");
    require(energy.dram_pj_per_byte > 0, "energy.dram_pj_per_byte");
    require(energy.activation_buffer_pj_per_byte > 0, "energy.activation_buffer_pj_per_byte");
    require(energy.weight_buffer_pj_per_byte > 0, "energy.weight_buffer_pj_per_byte");
    require(energy.pe_scratchpad_pj_per_byte > 0, "energy.pe_scratchpad_pj_per_byte");
    require(energy.mac_pj > 0, "energy.mac_pj");
}

ArchConfig arch_preset(const std::string& name) {
    ArchConfig a;
    a.name = name;
    if (name == "eyeriss") {
        a.pe_x = 14;
        a.pe_y = 12;
        a.macs_per_pe = 1;
        a.activation_buffer_bytes = 128 * kKiB;
        a.weight_buffer_bytes = 512 * kKiB;  // includes the intermediate weight buffer
    } else if (name == "simba") {
        a.pe_x = 4;
        a.pe_y = 4;
        a.macs_per_pe = 64;
        a.activation_buffer_bytes = 64 * kKiB;
        a.weight_buffer_bytes = 512 * kKiB;
    } else if (name == "simba2x2") {
        a.pe_x = 8;
        a.pe_y = 8;
        a.macs_per_pe = 64;
        a.activation_buffer_bytes = 256 * kKiB;
        a.weight_buffer_bytes = 2048 * kKiB;
    } else {
        throw ParseError("unknown arch preset: '" + name + "'");
    }
    return a;
}

std::vector<std::string> arch_preset_names() { return {"eyeriss", "simba", "simba2x2"}; }

bool is_arch_preset(const std::string& name) {
    return name == "eyeriss" || name == "simba" || name == "simba2x2";
}

namespace {

using nlohmann::json;

double get_number(const json& j, const char* field) {
    if (!j.is_number()) throw ParseError(std::string("arch field '") + field + "' must be a number");
    return j.get<double>();
}

int64_t get_int(const json& j, const char* field) {
    if (!j.is_number_integer())
        throw ParseError(std::string("arch field '") + field + "' must be an integer");
    return j.get<int64_t>();
}

}  // namespace

ArchConfig parse_arch(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("arch syntax error: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("arch document must be an object");

    ArchConfig a;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        if (key == "name") {
            if (!v.is_string()) throw ParseError("arch field 'name' must be a string");
            a.name = v.get<std::string>();
        } else if (key == "pe_x") {
            a.pe_x = get_int(v, "pe_x");
        } else if (key == "pe_y") {
            a.pe_y = get_int(v, "pe_y");
        } else if (key == "macs_per_pe") {
            a.macs_per_pe = get_int(v, "macs_per_pe");
        } else if (key == "activation_buffer_bytes") {
            a.activation_buffer_bytes = get_int(v, "activation_buffer_bytes");
        } else if (key == "weight_buffer_bytes") {
            a.weight_buffer_bytes = get_int(v, "weight_buffer_bytes");
        } else if (key == "clock_hz") {
            a.clock_hz = get_number(v, "clock_hz");
        } else if (key == "dram_bytes_per_sec") {
            a.dram_bytes_per_sec = get_number(v, "dram_bytes_per_sec");
        } else if (key == "energy") {
            if (!v.is_object()) throw ParseError("arch field 'energy' must be an object");
            for (auto et = v.begin(); et != v.end(); ++et) {
                const std::string& ek = et.key();
                if (ek == "dram_pj_per_byte")
                    a.energy.dram_pj_per_byte = get_number(et.value(), "energy.dram_pj_per_byte");
                else if (ek == "activation_buffer_pj_per_byte")
                    a.energy.activation_buffer_pj_per_byte =
                        get_number(et.value(), "energy.activation_buffer_pj_per_byte");
                else if (ek == "weight_buffer_pj_per_byte")
                    a.energy.weight_buffer_pj_per_byte =
                        get_number(et.value(), "energy.weight_buffer_pj_per_byte");
                else if (ek == "pe_scratchpad_pj_per_byte")
                    a.energy.pe_scratchpad_pj_per_byte =
                        get_number(et.value(), "energy.pe_scratchpad_pj_per_byte");
                else if (ek == "mac_pj")
                    a.energy.mac_pj = get_number(et.value(), "energy.mac_pj");
                else
                    throw ParseError("unknown arch field 'energy." + ek + "'");
            }
        } else {
            throw ParseError("unknown arch field '" + key + "'");
        }
    }
    a.validate();
    return a;
}

std::string serialize_arch(const ArchConfig& a) {
    json doc;
    doc["name"] = a.name;
    doc["pe_x"] = a.pe_x;
    doc["pe_y"] = a.pe_y;
    doc["macs_per_pe"] = a.macs_per_pe;
    doc["activation_buffer_bytes"] = a.activation_buffer_bytes;
    doc["weight_buffer_bytes"] = a.weight_buffer_bytes;
    doc["clock_hz"] = a.clock_hz;
    doc["dram_bytes_per_sec"] = a.dram_bytes_per_sec;
    doc["energy"] = {
        {"dram_pj_per_byte", a.energy.dram_pj_per_byte},
        {"activation_buffer_pj_per_byte", a.energy.activation_buffer_pj_per_byte},
        {"weight_buffer_pj_per_byte", a.energy.weight_buffer_pj_per_byte},
        {"pe_scratchpad_pj_per_byte", a.energy.pe_scratchpad_pj_per_byte},
        {"mac_pj", a.energy.mac_pj},
    };
    return doc.dump(2) + "\n";
}

}  // namespace fuseplan
