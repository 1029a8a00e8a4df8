#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thief/date.hpp"
#include "thief/hierarchy.hpp"

namespace thief {

// Every imputed cell (interpolated hour, forward-filled fuel close) is
// recorded here; nothing is patched silently.
struct IngestionLog {
    std::vector<std::string> entries;
    void note(std::string msg) { entries.push_back(std::move(msg)); }
};

// Aligned daily market records. Dates are contiguous; every vector has
// one entry per day. api2/ttf are stored as published per calendar day
// (weekend gaps already forward-filled); the d-2 lag is applied by the
// feature builder, not here.
struct PanelData {
    std::vector<Date> dates;
    std::vector<std::array<double, kHoursPerDay>> prices;   // EUR/MWh
    std::vector<std::array<double, kHoursPerDay>> load_fc;  // MW
    std::vector<std::array<double, kHoursPerDay>> wind_fc;  // MW
    std::vector<double> api2_close;                         // EUR/t
    std::vector<double> ttf_close;                          // EUR/MWh
    std::vector<int> weekday;                               // 1 = Monday .. 7 = Sunday
    IngestionLog log;

    std::size_t days() const { return dates.size(); }

    std::optional<std::size_t> index_of(Date d) const {
        if (dates.empty() || d < dates.front() || d > dates.back()) return std::nullopt;
        return static_cast<std::size_t>(d - dates.front());
    }
};

// Loads and validates the four input files (schemas in the README).
// Hourly series must cover a common contiguous date range; up to two
// consecutive missing hours per day are linearly interpolated (logged),
// more are an error. Fuel quotes are forward-filled over non-trading
// days.
PanelData load_panel(const std::filesystem::path& price_file,
                     const std::filesystem::path& load_file,
                     const std::filesystem::path& wind_file,
                     const std::filesystem::path& fuel_file);

// Base forecasts produced outside this repo (one 60-block vector per
// day), e.g. by a gradient-boosting or foundation-model pipeline.
struct ExternalBaseForecasts {
    std::string model_name;
    std::vector<Date> dates;
    std::vector<HierarchyVector> forecasts;

    std::optional<std::size_t> index_of(Date d) const {
        if (dates.empty() || d < dates.front() || d > dates.back()) return std::nullopt;
        const std::size_t i = static_cast<std::size_t>(d - dates.front());
        return i < dates.size() ? std::optional(i) : std::nullopt;
    }
};

// Reads `date,block_length,block_index,value` rows. Every present day
// must carry all 60 blocks exactly once; dates must be contiguous.
ExternalBaseForecasts load_external_base_forecasts(const std::filesystem::path& file);

// One day of output: base forecasts and, when reconciliation ran, the
// reconciled set.
struct DayForecasts {
    Date date;
    HierarchyVector base{};
    std::optional<HierarchyVector> reconciled;
};

// Writes `date,block_length,block_index,base,reconciled` with full
// double precision; loading the file back reproduces the values.
void write_forecasts(std::span<const DayForecasts> days, const std::filesystem::path& path);

// Inverse of write_forecasts; also used to resume interrupted backtests.
std::vector<DayForecasts> load_forecasts(const std::filesystem::path& path);

}  // namespace thief
