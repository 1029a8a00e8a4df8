#pragma once

#include <cstdint>
#include <filesystem>

#include "thief/dataio.hpp"

namespace thief {

// Desk-scale synthetic market generator: AR(1) daily price level,
// deterministic hourly shape driven by load and wind fundamentals,
// weekday effects, fuel-price random walks quoted on weekdays only, and
// occasional deep negative price spikes. Deterministic per seed.
struct SynthConfig {
    std::uint64_t seed = 1;
    int days = 365;
    Date start = Date::from_ymd(2018, 1, 1);
};

// In-memory panel, identical to what load_panel returns after
// write_synth_files (weekend fuel quotes forward-filled the same way).
PanelData synth_panel(const SynthConfig& config);

// Writes prices.csv, load.csv, wind.csv and fuels.csv under out_dir.
void write_synth_files(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace thief
