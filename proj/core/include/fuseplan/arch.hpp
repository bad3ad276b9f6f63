#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fuseplan/layer.hpp"

namespace fuseplan {

/// Per-access energies. The defaults are order-of-magnitude values for an
/// edge accelerator memory hierarchy; they are fully configurable through
/// the arch document.
struct EnergyTable {
    double dram_pj_per_byte = 100.0;
    double activation_buffer_pj_per_byte = 2.0;
    double weight_buffer_pj_per_byte = 2.0;
    double pe_scratchpad_pj_per_byte = 0.5;
    double mac_pj = 0.2;
};

/// Parameterized edge accelerator: PE array geometry, the two top-level
/// on-chip buffers, clock, DRAM link, and the energy table.
struct ArchConfig {
    std::string name = "custom";
    int64_t pe_x = 1;
    int64_t pe_y = 1;
    int64_t macs_per_pe = 1;
    int64_t activation_buffer_bytes = 0;
    int64_t weight_buffer_bytes = 0;
    double clock_hz = 200e6;
    double dram_bytes_per_sec = 128e9;
    EnergyTable energy;

    int64_t peak_macs_per_cycle() const { return pe_x * pe_y * macs_per_pe; }
    double dram_bytes_per_cycle() const { return dram_bytes_per_sec / clock_hz; }

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Bundled presets: eyeriss (14x12 PEs, 1 MAC/PE, 128 KiB act / 512 KiB
/// weight), simba (4x4, 64 MACs/PE, 64 KiB / 512 KiB), simba2x2 (8x8,
/// 64 MACs/PE, 256 KiB / 2048 KiB).
ArchConfig arch_preset(const std::string& name);
std::vector<std::string> arch_preset_names();
bool is_arch_preset(const std::string& name);

/// JSON document with fields mirroring ArchConfig; unknown fields rejected.
ArchConfig parse_arch(const std::string& json_text);
std::string serialize_arch(const ArchConfig& arch);

}  // namespace fuseplan
