#include "thief/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "thief/rng.hpp"

namespace thief {

namespace {

// Relative intraday load profile (two peaks, night trough).
constexpr std::array<double, kHoursPerDay> kLoadShape = {
    0.82, 0.78, 0.76, 0.75, 0.76, 0.80, 0.90, 1.02, 1.08, 1.08, 1.06, 1.05,
    1.03, 1.01, 0.99, 0.99, 1.02, 1.08, 1.14, 1.12, 1.05, 0.98, 0.92, 0.86};

struct RawSynth {
    std::vector<Date> dates;
    std::vector<std::array<double, kHoursPerDay>> prices;
    std::vector<std::array<double, kHoursPerDay>> load;
    std::vector<std::array<double, kHoursPerDay>> wind;
    std::vector<Date> fuel_dates;  // weekdays only
    std::vector<double> api2;
    std::vector<double> ttf;
};

RawSynth generate(const SynthConfig& config) {
    if (config.days < 30)
        throw ValidationError(cat("synth: needs at least 30 days, got ", config.days));

    Rng rng(derive_seed(config.seed, 0x73796e7468ULL));
    RawSynth out;

    double api2 = 95.0;
    double ttf = 34.0;
    double level = 0.0;       // AR(1) daily price level around zero
    double wind_state = 0.45; // AR(1) wind availability in (0, 1)

    // Fuel closes lag two days in the feature set, so quotes start two
    // days before the first delivery day.
    for (int offset = -2; offset < config.days; ++offset) {
        const Date date = config.start + offset;
        api2 = std::max(40.0, api2 + 1.4 * rng.normal());
        ttf = std::max(12.0, ttf + 0.9 * rng.normal());
        if (date.iso_weekday() <= 5) {
            out.fuel_dates.push_back(date);
            out.api2.push_back(api2);
            out.ttf.push_back(ttf);
        }
        if (offset < 0) continue;

        const int wd = date.iso_weekday();
        const double weekday_load = wd == 6 ? 0.93 : wd == 7 ? 0.86 : 1.0;
        const double season =
            1.0 + 0.07 * std::sin(2.0 * std::numbers::pi * (offset % 365) / 365.0 + 0.6);

        level = 0.92 * level + 5.0 * rng.normal();
        wind_state = std::clamp(0.45 + 0.85 * (wind_state - 0.45) + 0.13 * rng.normal(),
                                0.03, 0.95);

        const bool spike_day = rng.uniform() < 0.012;
        const std::size_t spike_hour = 12 + rng.uniform_index(5);
        const double spike_size = rng.uniform(250.0, 650.0);

        std::array<double, kHoursPerDay> load{}, wind{}, price{};
        for (int h = 0; h < kHoursPerDay; ++h) {
            load[h] = 52000.0 * kLoadShape[h] * weekday_load * season *
                      (1.0 + 0.02 * rng.normal());
            const double hour_wind = 1.0 + 0.35 * std::sin(2.0 * std::numbers::pi * h / 24.0);
            wind[h] = std::max(150.0, 30000.0 * wind_state * hour_wind *
                                          (1.0 + 0.10 * rng.normal()));
            const double residual_demand = load[h] - wind[h];
            price[h] = -35.0 + 1.35 * ttf + 0.18 * api2 + 0.0016 * residual_demand + level +
                       6.0 * rng.normal();
            if (spike_day && static_cast<std::size_t>(h) == spike_hour) price[h] -= spike_size;
        }
        out.dates.push_back(date);
        out.prices.push_back(price);
        out.load.push_back(load);
        out.wind.push_back(wind);
    }
    return out;
}

void write_hourly_csv(const std::filesystem::path& path, std::span<const Date> dates,
                      std::span<const std::array<double, kHoursPerDay>> rows) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw ValidationError(cat("cannot write ", path.string()));
    std::fprintf(f, "date");
    for (int h = 1; h <= kHoursPerDay; ++h) std::fprintf(f, ",h%d", h);
    std::fprintf(f, "\n");
    for (std::size_t d = 0; d < dates.size(); ++d) {
        std::fprintf(f, "%s", dates[d].to_string().c_str());
        for (int h = 0; h < kHoursPerDay; ++h) std::fprintf(f, ",%.17g", rows[d][h]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace

PanelData synth_panel(const SynthConfig& config) {
    const RawSynth raw = generate(config);
    PanelData panel;
    panel.dates = raw.dates;
    panel.prices = raw.prices;
    panel.load_fc = raw.load;
    panel.wind_fc = raw.wind;
    panel.weekday.reserve(raw.dates.size());
    for (const Date d : raw.dates) panel.weekday.push_back(d.iso_weekday());

    // Forward-fill weekend/holiday fuel gaps exactly like load_panel.
    std::size_t qi = 0;
    double last_api2 = 0.0, last_ttf = 0.0;
    for (const Date d : raw.dates) {
        while (qi < raw.fuel_dates.size() && raw.fuel_dates[qi] <= d) {
            last_api2 = raw.api2[qi];
            last_ttf = raw.ttf[qi];
            ++qi;
        }
        panel.api2_close.push_back(last_api2);
        panel.ttf_close.push_back(last_ttf);
    }
    return panel;
}

void write_synth_files(const SynthConfig& config, const std::filesystem::path& out_dir) {
    const RawSynth raw = generate(config);
    std::filesystem::create_directories(out_dir);
    write_hourly_csv(out_dir / "prices.csv", raw.dates, raw.prices);
    write_hourly_csv(out_dir / "load.csv", raw.dates, raw.load);
    write_hourly_csv(out_dir / "wind.csv", raw.dates, raw.wind);

    std::FILE* f = std::fopen((out_dir / "fuels.csv").string().c_str(), "w");
    if (f == nullptr) throw ValidationError(cat("cannot write ", (out_dir / "fuels.csv").string()));
    std::fprintf(f, "date,api2_close,ttf_close\n");
    for (std::size_t i = 0; i < raw.fuel_dates.size(); ++i)
        std::fprintf(f, "%s,%.17g,%.17g\n", raw.fuel_dates[i].to_string().c_str(), raw.api2[i],
                     raw.ttf[i]);
    std::fclose(f);
}

}  // namespace thief
