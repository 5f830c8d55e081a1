#pragma once

#include "noslip/stability.hpp"
#include "noslip/verification.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace noslip::cli {

/// 17 significant digits, enough to round-trip a double.
std::string fmt17(double x);
/// 6 significant digits for plot coordinates.
std::string fmt6(double x);

/// One line of the trajectory CSV. termination is only set on the last row.
struct TrajectoryRow {
    std::size_t step = 0;
    std::size_t piece = 0;
    double s = 0.0;
    double pos_x = 0.0;
    double pos_y = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double flight_time = 0.0;
    std::string termination;
};

inline constexpr const char* kTrajectoryHeader =
    "step,piece_index,s,pos_x,pos_y,u1,u2,flight_time,termination";

std::vector<TrajectoryRow> trajectory_rows(const TrajectoryRecord& record);
std::string trajectory_csv(const TrajectoryRecord& record);
std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text);
std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path);
/// Rebuilds the post-collision state a row describes.
State state_from_row(const Table& table, const TrajectoryRow& row);

struct PortraitPoint {
    double u1;
    double u2;
    std::size_t orbit;
};

std::string portrait_csv(const std::vector<PortraitPoint>& points);
/// Scatter of (u1, u2) over the unit disc, colored by orbit.
std::string portrait_svg(const std::vector<PortraitPoint>& points, const std::string& title);
/// Table outline and the planar flight segments of each record.
std::string trajectory_svg(const Table& table, const std::vector<TrajectoryRecord>& records);

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const StabilityReport& r);

/// Writes text to path, creating parent directories. Throws std::runtime_error.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace noslip::cli
