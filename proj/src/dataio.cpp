#include "thief/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>

namespace thief {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

double parse_number(const std::string& cell, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
        throw ValidationError(cat(context, ": malformed number '", cell, "'"));
    if (!std::isfinite(v)) throw ValidationError(cat(context, ": non-finite value '", cell, "'"));
    return v;
}

long parse_integer(const std::string& cell, const std::string& context) {
    char* end = nullptr;
    const long v = std::strtol(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0')
        throw ValidationError(cat(context, ": malformed integer '", cell, "'"));
    return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(cat("cannot open ", path.string()));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw ValidationError(cat(path.string(), ": file is empty"));
    return lines;
}

void expect_header(const std::vector<std::string>& cells,
                   const std::vector<std::string>& expected,
                   const std::filesystem::path& path) {
    if (cells != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
        throw ValidationError(cat(path.string(), ": unexpected header (expected '", want, "')"));
    }
}

std::vector<std::string> hourly_header() {
    std::vector<std::string> h = {"date"};
    for (int i = 1; i <= kHoursPerDay; ++i) h.push_back(cat("h", i));
    return h;
}

struct HourlySeries {
    std::vector<Date> dates;
    std::vector<std::array<double, kHoursPerDay>> rows;  // NaN marks a missing cell
};

HourlySeries read_hourly_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    expect_header(split_csv_line(lines[0]), hourly_header(), path);

    HourlySeries series;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto cells = split_csv_line(lines[li]);
        if (cells.size() != 1 + kHoursPerDay)
            throw ValidationError(cat(path.string(), " line ", li + 1, ": expected ",
                                      1 + kHoursPerDay, " cells, got ", cells.size()));
        const Date date = Date::parse(cells[0]);
        if (!series.dates.empty() && date <= series.dates.back())
            throw ValidationError(cat(path.string(), ": dates not strictly increasing at ",
                                      date.to_string()));
        std::array<double, kHoursPerDay> row{};
        for (int h = 0; h < kHoursPerDay; ++h) {
            const std::string& cell = cells[1 + h];
            row[h] = is_blank(cell)
                         ? kMissing
                         : parse_number(cell, cat(path.string(), " ", date.to_string(), " h", h + 1));
        }
        series.dates.push_back(date);
        series.rows.push_back(row);
    }
    return series;
}

// Fills missing hour cells in place. Runs of more than two missing hours
// are an error; shorter runs are linearly interpolated between the
// nearest present hours (or copied from the single neighbor at the day's
// edge). DST days arrive this way: the spring switch leaves one empty
// cell, the autumn duplicate is already averaged into a single cell by
// the 24-column schema.
void patch_missing_hours(HourlySeries& series, const std::string& label, IngestionLog& log) {
    for (std::size_t d = 0; d < series.rows.size(); ++d) {
        auto& row = series.rows[d];
        int h = 0;
        while (h < kHoursPerDay) {
            if (!std::isnan(row[h])) {
                ++h;
                continue;
            }
            int run_end = h;
            while (run_end < kHoursPerDay && std::isnan(row[run_end])) ++run_end;
            const int run = run_end - h;
            if (run > 2)
                throw ValidationError(cat(label, " ", series.dates[d].to_string(), ": ", run,
                                          " consecutive missing hours (at most 2 can be interpolated)"));
            const int left = h - 1;
            const int right = run_end;
            for (int k = h; k < run_end; ++k) {
                double v;
                if (left >= 0 && right < kHoursPerDay) {
                    const double t = static_cast<double>(k - left) / (right - left);
                    v = row[left] + t * (row[right] - row[left]);
                } else if (left >= 0) {
                    v = row[left];
                } else if (right < kHoursPerDay) {
                    v = row[right];
                } else {
                    throw ValidationError(cat(label, " ", series.dates[d].to_string(),
                                              ": entire day missing"));
                }
                row[k] = v;
                log.note(cat(label, " ", series.dates[d].to_string(), ": interpolated missing h",
                             k + 1, " -> ", v));
            }
            h = run_end;
        }
    }
}

void check_contiguous(const HourlySeries& series, const std::string& label) {
    for (std::size_t i = 1; i < series.dates.size(); ++i) {
        if (series.dates[i] - series.dates[i - 1] != 1)
            throw ValidationError(cat(label, ": missing day ",
                                      (series.dates[i - 1] + 1).to_string()));
    }
}

struct FuelSeries {
    std::vector<Date> dates;
    std::vector<double> api2;  // NaN marks a missing cell
    std::vector<double> ttf;
};

FuelSeries read_fuel_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    expect_header(split_csv_line(lines[0]), {"date", "api2_close", "ttf_close"}, path);
    FuelSeries fuels;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto cells = split_csv_line(lines[li]);
        if (cells.size() != 3)
            throw ValidationError(cat(path.string(), " line ", li + 1, ": expected 3 cells"));
        const Date date = Date::parse(cells[0]);
        if (!fuels.dates.empty() && date <= fuels.dates.back())
            throw ValidationError(cat(path.string(), ": dates not strictly increasing at ",
                                      date.to_string()));
        fuels.dates.push_back(date);
        fuels.api2.push_back(is_blank(cells[1]) ? kMissing
                                                : parse_number(cells[1], cat(path.string(), " api2 ",
                                                                             date.to_string())));
        fuels.ttf.push_back(is_blank(cells[2]) ? kMissing
                                               : parse_number(cells[2], cat(path.string(), " ttf ",
                                                                            date.to_string())));
    }
    return fuels;
}

// Maps a (possibly gappy) fuel series onto the panel dates, carrying the
// last published close forward over weekends and holidays.
std::vector<double> forward_fill_fuel(const FuelSeries& fuels, bool use_api2,
                                      std::span<const Date> panel_dates,
                                      const std::string& label, IngestionLog& log) {
    std::map<std::int32_t, double> by_day;
    for (std::size_t i = 0; i < fuels.dates.size(); ++i) {
        const double v = use_api2 ? fuels.api2[i] : fuels.ttf[i];
        if (!std::isnan(v)) by_day[fuels.dates[i].serial] = v;
    }
    if (by_day.empty()) throw ValidationError(cat(label, ": no quotes in fuel file"));

    std::vector<double> out;
    out.reserve(panel_dates.size());
    for (const Date d : panel_dates) {
        auto it = by_day.upper_bound(d.serial);
        if (it == by_day.begin())
            throw ValidationError(cat(label, ": no quote available on or before ", d.to_string()));
        --it;
        out.push_back(it->second);
        if (it->first != d.serial)
            log.note(cat(label, " ", d.to_string(), ": forward-filled close from ",
                         Date{it->first}.to_string()));
    }
    return out;
}

void append_forecast_rows(std::FILE* f, Date date, const HierarchyVector& base,
                          const HierarchyVector* reconciled) {
    const std::string ds = date.to_string();
    for (int ord = 0; ord < kNumBlocks; ++ord) {
        const BlockId b = block_at(ord);
        char num1[32], num2[32];
        std::snprintf(num1, sizeof num1, "%.17g", base[ord]);
        if (reconciled != nullptr) {
            std::snprintf(num2, sizeof num2, "%.17g", (*reconciled)[ord]);
            std::fprintf(f, "%s,%d,%d,%s,%s\n", ds.c_str(), b.length, b.index, num1, num2);
        } else {
            std::fprintf(f, "%s,%d,%d,%s,\n", ds.c_str(), b.length, b.index, num1);
        }
    }
}

}  // namespace

PanelData load_panel(const std::filesystem::path& price_file,
                     const std::filesystem::path& load_file,
                     const std::filesystem::path& wind_file,
                     const std::filesystem::path& fuel_file) {
    PanelData panel;

    HourlySeries prices = read_hourly_csv(price_file);
    HourlySeries load = read_hourly_csv(load_file);
    HourlySeries wind = read_hourly_csv(wind_file);
    const FuelSeries fuels = read_fuel_csv(fuel_file);

    check_contiguous(prices, "prices");
    check_contiguous(load, "load");
    check_contiguous(wind, "wind");
    if (prices.dates.empty()) throw ValidationError("prices: no data rows");

    // The panel covers the common range of the three hourly files.
    const Date start = std::max({prices.dates.front(), load.dates.front(), wind.dates.front()});
    const Date end = std::min({prices.dates.back(), load.dates.back(), wind.dates.back()});
    if (start > end) throw ValidationError("price/load/wind files share no common date range");

    patch_missing_hours(prices, "prices", panel.log);
    patch_missing_hours(load, "load", panel.log);
    patch_missing_hours(wind, "wind", panel.log);

    const auto slice = [&](const HourlySeries& s) {
        const std::size_t off = static_cast<std::size_t>(start - s.dates.front());
        const std::size_t n = static_cast<std::size_t>(end - start) + 1;
        return std::vector<std::array<double, kHoursPerDay>>(s.rows.begin() + off,
                                                             s.rows.begin() + off + n);
    };
    panel.prices = slice(prices);
    panel.load_fc = slice(load);
    panel.wind_fc = slice(wind);
    for (Date d = start; d <= end; ++d) {
        panel.dates.push_back(d);
        panel.weekday.push_back(d.iso_weekday());
    }
    panel.api2_close = forward_fill_fuel(fuels, true, panel.dates, "fuels api2", panel.log);
    panel.ttf_close = forward_fill_fuel(fuels, false, panel.dates, "fuels ttf", panel.log);
    return panel;
}

ExternalBaseForecasts load_external_base_forecasts(const std::filesystem::path& file) {
    const auto lines = read_lines(file);
    expect_header(split_csv_line(lines[0]), {"date", "block_length", "block_index", "value"}, file);

    ExternalBaseForecasts ext;
    ext.model_name = file.stem().string();

    std::map<std::int32_t, std::pair<HierarchyVector, std::array<bool, kNumBlocks>>> days;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto cells = split_csv_line(lines[li]);
        if (cells.size() != 4)
            throw ValidationError(cat(file.string(), " line ", li + 1, ": expected 4 cells"));
        const Date date = Date::parse(cells[0]);
        const long length = parse_integer(cells[1], cat(file.string(), " ", date.to_string()));
        const long index = parse_integer(cells[2], cat(file.string(), " ", date.to_string()));
        const BlockId block{static_cast<int>(length), static_cast<int>(index)};
        if (!is_valid_block(block))
            throw ValidationError(cat(file.string(), " ", date.to_string(), ": unknown block (",
                                      length, "H, index ", index, ")"));
        const double value =
            parse_number(cells[3], cat(file.string(), " ", date.to_string(), " block ", length, "H"));
        const int ord = block_ordinal(block);
        auto& [vec, seen] = days[date.serial];
        if (seen[ord])
            throw ValidationError(cat(file.string(), " ", date.to_string(), ": duplicate block (",
                                      length, "H, index ", index, ")"));
        seen[ord] = true;
        vec[ord] = value;
    }

    for (const auto& [serial, day] : days) {
        const auto& [vec, seen] = day;
        for (int ord = 0; ord < kNumBlocks; ++ord) {
            if (!seen[ord]) {
                const BlockId b = block_at(ord);
                throw ValidationError(cat(file.string(), " ", Date{serial}.to_string(),
                                          ": missing block (", b.length, "H, index ", b.index, ")"));
            }
        }
        if (!ext.dates.empty() && serial != ext.dates.back().serial + 1)
            throw ValidationError(cat(file.string(), ": missing day ",
                                      (ext.dates.back() + 1).to_string()));
        ext.dates.push_back(Date{serial});
        ext.forecasts.push_back(vec);
    }
    return ext;
}

void write_forecasts(std::span<const DayForecasts> days, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw ValidationError(cat("cannot write ", path.string()));
    std::fprintf(f, "date,block_length,block_index,base,reconciled\n");
    for (const auto& day : days)
        append_forecast_rows(f, day.date, day.base,
                             day.reconciled ? &*day.reconciled : nullptr);
    if (std::fclose(f) != 0) throw ValidationError(cat("error closing ", path.string()));
}

std::vector<DayForecasts> load_forecasts(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    expect_header(split_csv_line(lines[0]),
                  {"date", "block_length", "block_index", "base", "reconciled"}, path);

    std::vector<DayForecasts> out;
    std::array<bool, kNumBlocks> seen{};
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto cells = split_csv_line(lines[li]);
        if (cells.size() != 5)
            throw ValidationError(cat(path.string(), " line ", li + 1, ": expected 5 cells"));
        const Date date = Date::parse(cells[0]);
        const BlockId block{static_cast<int>(parse_integer(cells[1], path.string())),
                            static_cast<int>(parse_integer(cells[2], path.string()))};
        if (!is_valid_block(block))
            throw ValidationError(cat(path.string(), " ", date.to_string(), ": unknown block"));
        const int ord = block_ordinal(block);

        if (out.empty() || out.back().date != date) {
            if (!out.empty()) {
                for (int o = 0; o < kNumBlocks; ++o)
                    if (!seen[o])
                        throw ValidationError(cat(path.string(), " ", out.back().date.to_string(),
                                                  ": incomplete day"));
            }
            out.push_back(DayForecasts{date, {}, std::nullopt});
            seen.fill(false);
        }
        if (seen[ord])
            throw ValidationError(cat(path.string(), " ", date.to_string(), ": duplicate block"));
        seen[ord] = true;
        out.back().base[ord] = parse_number(cells[3], cat(path.string(), " base ", date.to_string()));
        if (!is_blank(cells[4])) {
            if (!out.back().reconciled) out.back().reconciled = HierarchyVector{};
            (*out.back().reconciled)[ord] =
                parse_number(cells[4], cat(path.string(), " reconciled ", date.to_string()));
        }
    }
    if (!out.empty())
        for (int o = 0; o < kNumBlocks; ++o)
            if (!seen[o])
                throw ValidationError(cat(path.string(), " ", out.back().date.to_string(),
                                          ": incomplete day"));
    return out;
}

}  // namespace thief
