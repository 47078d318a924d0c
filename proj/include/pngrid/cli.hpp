#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pngrid/config.hpp"
#include "pngrid/fusion.hpp"
#include "pngrid/troupe.hpp"
#include "pngrid/world.hpp"

namespace pngrid {

// Corridor-and-rooms demo floor plan, 15 m x 12 m: a central corridor,
// two rooms above, three below, doorways between. Also shipped as
// worlds/fig8.txt.
inline constexpr const char* kDemoWorld =
    "cell 0.5\n"
    "..............#...............\n"
    "..............#...............\n"
    "..............#...............\n"
    "..............#...............\n"
    "..............#...............\n"
    "..............#...............\n"
    "..............#...............\n"
    "..............#...............\n"
    "..###########....###########..\n"
    "..............................\n"
    "..............................\n"
    "...............I..............\n"
    "..............................\n"
    "..............................\n"
    "..............................\n"
    "..###########....###########..\n"
    "........#...........#.........\n"
    "........#...........#.........\n"
    "........#...........#.........\n"
    "........#...........#.........\n"
    "........#...........#.........\n"
    "........#...........#.........\n"
    "........#...........#.........\n"
    "........#...........#.........\n";

namespace cli_detail {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw ParseError("cannot write " + path.string());
}

inline std::vector<BehaviourParams> behaviours_for(int robots, const std::string& file_text) {
    std::vector<BehaviourParams> base;
    if (file_text.empty()) {
        base = make_troupe_behaviours();
    } else {
        std::istringstream is(file_text);
        std::string line;
        std::size_t no = 0;
        while (std::getline(is, line)) {
            ++no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            auto t = split_ws(line);
            if (t.empty()) continue;
            if (t.size() != 3)
                throw ParseError("behaviours line " + std::to_string(no) +
                                 ": expected 'p_random_turn p_left_on_obstacle label'");
            BehaviourParams bp;
            bp.p_random_turn = parse_double(t[0], "behaviour p_random_turn");
            bp.p_left_on_obstacle = parse_double(t[1], "behaviour p_left_on_obstacle");
            bp.label = std::string(t[2]);
            base.push_back(bp);
        }
        if (base.empty()) throw ParseError("behaviours file has no entries");
    }
    std::vector<BehaviourParams> out;
    for (int i = 0; i < robots; ++i) out.push_back(base[static_cast<std::size_t>(i) % base.size()]);
    return out;
}

// Run one mission and write the mission directory. Returns nonzero if the
// written files do not survive their own parsers.
inline int simulate_run(const std::string& world_text, const RunConfig& cfg,
                        const std::vector<BehaviourParams>& behaviours, const fs::path& out_dir,
                        std::ostream& echo) {
    OrthogonalWorld world = load_world(world_text);
    MissionResult result = run_mission(world, behaviours, cfg.seed, cfg.robot);
    std::uint64_t tag = mission_tag(cfg, world_text);
    save_mission(out_dir, result, world, tag);
    write_file(out_dir / "config.txt", cfg.dump());
    write_file(out_dir / "world.txt", world_text);
    for (const RobotState& rs : result.robots)
        echo << "robot " << rs.id << ' ' << rs.behaviour.label << ' ' << mode_name(rs.mode)
             << " odometer " << format_num(rs.odometer) << " events " << rs.log.size() << '\n';
    echo << "delivered " << result.delivered.size() << " events, tag " << tag_hex(tag) << '\n';

    // Round-trip self check: everything written must parse back verbatim.
    MissionRecord rec = load_mission(out_dir);
    for (const auto& [id, payload] : rec.payloads) {
        std::ostringstream ss;
        payload.dump(ss);
        if (ss.str() != read_file(out_dir / ("robot_" + std::to_string(id) + ".poslog"))) {
            std::cerr << "self-check: robot " << id << " log did not round-trip\n";
            return 2;
        }
    }
    RunConfig reparsed;
    std::istringstream is(read_file(out_dir / "config.txt"));
    reparsed.apply(is);
    if (reparsed.dump() != cfg.dump()) {
        std::cerr << "self-check: config did not round-trip\n";
        return 2;
    }
    load_world(read_file(out_dir / "world.txt"));
    return 0;
}

inline int fuse_run(const std::vector<fs::path>& mission_dirs, const RunConfig& cfg,
                    const fs::path& out_dir, std::ostream& echo) {
    std::vector<MissionRecord> recs;
    double world_w = 0.0, world_h = 0.0;
    for (const fs::path& dir : mission_dirs) {
        recs.push_back(load_mission(dir));
        world_w = std::max(world_w, recs.back().world_width);
        world_h = std::max(world_h, recs.back().world_height);
    }
    double res = cfg.resolution;
    int w = std::max(1, static_cast<int>(std::ceil(world_w / res - 1e-9)));
    int h = std::max(1, static_cast<int>(std::ceil(world_h / res - 1e-9)));
    MapBuilder builder(new_grid(w, h, res, {0.0, 0.0}), cfg.robot.error);
    for (const MissionRecord& rec : recs) builder.ingest(delivered_from(rec), rec.tag);

    std::ostringstream grid_ss;
    builder.grid().dump(grid_ss);
    write_file(out_dir / "map.pngrid", grid_ss.str());
    std::ostringstream pgm_ss;
    render_pgm(builder.grid(), cfg.tau_occ, cfg.tau_free, pgm_ss);
    write_file(out_dir / "map.pgm", pgm_ss.str());
    FusionStats stats = compute_stats(builder.grid(), cfg.tau_occ, cfg.tau_free);
    std::ostringstream stats_ss;
    write_stats(stats_ss, stats, builder.singulars());
    write_file(out_dir / "stats.txt", stats_ss.str());
    write_file(out_dir / "config.txt", cfg.dump());
    echo << stats_ss.str();

    // Round-trip self check.
    std::istringstream grid_in(read_file(out_dir / "map.pngrid"));
    PossNecGrid reparsed = PossNecGrid::parse(grid_in);
    std::ostringstream grid_ss2;
    reparsed.dump(grid_ss2);
    if (grid_ss2.str() != grid_ss.str()) {
        std::cerr << "self-check: grid dump did not round-trip\n";
        return 2;
    }
    if (read_file(out_dir / "map.pgm") != pgm_ss.str() ||
        read_file(out_dir / "stats.txt") != stats_ss.str()) {
        std::cerr << "self-check: rendered outputs did not round-trip\n";
        return 2;
    }
    return 0;
}

}  // namespace cli_detail

inline int run_cli(int argc, char** argv) {
    namespace fs = std::filesystem;
    CLI::App app{"multi-robot exploration and possibility/necessity grid mapping"};
    app.require_subcommand(1);

    std::string world_path, out_dir, config_path, behaviours_path;
    std::vector<std::string> mission_dirs;
    RunConfig cfg;
    std::uint64_t seed = 0;
    int robots = 0;
    double resolution = 0.0, max_error = 0.0, dt = 0.0, tau_occ = 0.0, tau_free = 0.0;

    CLI::App* sim = app.add_subcommand("simulate", "run one exploration mission");
    sim->add_option("--world", world_path, "world map file")->required();
    sim->add_option("--robots", robots, "number of robots");
    sim->add_option("--seed", seed, "mission seed (required: runs are reproducible)")->required();
    sim->add_option("--out", out_dir, "output mission directory")->required();
    sim->add_option("--config", config_path, "key=value config file");
    sim->add_option("--behaviours", behaviours_path, "behaviour table file");
    sim->add_option("--resolution", resolution, "grid cell size, m");
    sim->add_option("--max-error", max_error, "exploration abort error, m");
    sim->add_option("--dt", dt, "tick length, s");

    CLI::App* fuse = app.add_subcommand("fuse", "fuse mission logs into a map");
    fuse->add_option("missions", mission_dirs, "mission directories")->required();
    fuse->add_option("--out", out_dir, "output directory")->required();
    fuse->add_option("--config", config_path, "key=value config file");
    fuse->add_option("--resolution", resolution, "grid cell size, m");
    fuse->add_option("--max-error", max_error, "pyramid zero-height error, m");
    fuse->add_option("--tau-occ", tau_occ, "occupied threshold");
    fuse->add_option("--tau-free", tau_free, "free threshold");

    CLI::App* demo = app.add_subcommand("demo", "three robots on the shipped floor plan");
    demo->add_option("--out", out_dir, "output directory")->required();
    demo->add_option("--seed", seed, "demo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!config_path.empty()) {
            std::istringstream is(cli_detail::read_file(config_path));
            cfg.apply(is);
        }
        auto apply_flag = [&](CLI::App* cmd, const char* name, auto setter) {
            const CLI::Option* opt = cmd->get_option_no_throw(name);
            if (opt && opt->count()) setter();
        };
        CLI::App* cmd = sim->parsed() ? sim : fuse->parsed() ? fuse : demo;
        apply_flag(cmd, "--seed", [&] { cfg.seed = seed; });
        apply_flag(cmd, "--robots", [&] { cfg.robots = robots; });
        apply_flag(cmd, "--resolution", [&] { cfg.resolution = resolution; });
        apply_flag(cmd, "--max-error", [&] { cfg.robot.error.max_error = max_error; });
        apply_flag(cmd, "--dt", [&] { cfg.robot.dt = dt; });
        apply_flag(cmd, "--tau-occ", [&] { cfg.tau_occ = tau_occ; });
        apply_flag(cmd, "--tau-free", [&] { cfg.tau_free = tau_free; });

        if (sim->parsed()) {
            std::string world_text = cli_detail::read_file(world_path);
            std::string beh_text =
                behaviours_path.empty() ? std::string() : cli_detail::read_file(behaviours_path);
            auto behaviours = cli_detail::behaviours_for(cfg.robots, beh_text);
            return cli_detail::simulate_run(world_text, cfg, behaviours, out_dir, std::cout);
        }
        if (fuse->parsed()) {
            std::vector<fs::path> dirs(mission_dirs.begin(), mission_dirs.end());
            return cli_detail::fuse_run(dirs, cfg, out_dir, std::cout);
        }
        // demo: fixed world, three robots, fixed default seed.
        if (!demo->count("--seed")) cfg.seed = 11;
        cfg.robots = 3;
        fs::path out(out_dir);
        auto behaviours = cli_detail::behaviours_for(cfg.robots, "");
        int rc = cli_detail::simulate_run(kDemoWorld, cfg, behaviours, out / "mission", std::cout);
        if (rc != 0) return rc;
        return cli_detail::fuse_run({out / "mission"}, cfg, out, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace pngrid
