#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "kinslab/config.hpp"
#include "kinslab/errors.hpp"

using namespace kinslab;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, MinimalConfigResolvesTheDefaults) {
    const RunConfig cfg = parse_config("[model]\ncollision = bgk\nepsilon = 1\n");
    EXPECT_EQ(cfg.sim.nx, 64);
    EXPECT_EQ(cfg.sim.nv, 64);
    EXPECT_EQ(cfg.sim.vmax, 8.0);
    EXPECT_EQ(cfg.sim.cfl, 0.5);
    EXPECT_EQ(cfg.sim.final_time, 5.0);
    EXPECT_EQ(cfg.sim.boundary.at(Wall::Left).alpha, 1.0);
    EXPECT_EQ(cfg.sim.boundary.at(Wall::Right).beta, 0.0);
    EXPECT_EQ(cfg.sim.potential.kind, PotentialKind::Zero);
    EXPECT_FALSE(cfg.output.snapshots);
    const auto echo = config_echo(cfg);
    EXPECT_EQ(echo["grids"]["nx"], 64);
    EXPECT_EQ(echo["time"]["cfl"], 0.5);
}

TEST(Config, ErrorsCarryTheKeyPath) {
    EXPECT_NE(error_of("[boundary]\nalpha_left = 0.6\nbeta_left = 0.5\n").find("alpha + beta <= 1"), std::string::npos);
    EXPECT_NE(error_of("[model]\nepsilon = 0\n").find("model.epsilon"), std::string::npos);
    EXPECT_NE(error_of("[grids]\nnv = 63\n").find("grids.nv"), std::string::npos);
    EXPECT_NE(error_of("[grids]\nnx = sixty\n").find("grids.nx"), std::string::npos);
    EXPECT_NE(error_of("[grids]\nspacing = 2\n").find("grids.spacing: unknown key"), std::string::npos);
    EXPECT_NE(error_of("[solver]\nx = 1\n").find("solver"), std::string::npos);
    EXPECT_NE(error_of("[model]\ncollision = boltzmann\n").find("model.collision"), std::string::npos);
    EXPECT_FALSE(error_of("[model\nepsilon = 1\n").empty());
    EXPECT_FALSE(error_of("[potential]\nkind = table\n").empty());
}

TEST(Config, RenderedConfigParsesBackIdentically) {
    const RunConfig cfg = parse_config(
        "[model]\ncollision = fp\nepsilon = 0.3\n[grids]\nnx = 40\n[boundary]\nalpha_left = 0.2\n"
        "beta_left = 0.3\n[potential]\nkind = cosine\namplitude = 0.5\n[initial]\nkind = shifted\n"
        "[time]\nfinal = 2\nrecord_interval = 0.02\n[output]\nsnapshots = true\n");
    const RunConfig back = parse_config(render_config(cfg));
    EXPECT_EQ(config_echo(cfg), config_echo(back));
    EXPECT_EQ(back.sim.boundary.at(Wall::Left).beta, 0.3);
    EXPECT_EQ(back.sim.boundary.at(Wall::Right).alpha, 1.0);
    EXPECT_TRUE(back.output.snapshots);
}

TEST(Config, TablePathIsResolvedAgainstTheConfigDirectory) {
    const auto dir = std::filesystem::temp_directory_path() / "kinslab_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "phi.txt") << "0 0\n1 1\n";
        std::ofstream(dir / "run.ini") << "[potential]\nkind = table\nfile = phi.txt\n";
    }
    const RunConfig cfg = load_config((dir / "run.ini").string());
    EXPECT_EQ(cfg.sim.potential.kind, PotentialKind::Tabulated);
    EXPECT_TRUE(std::filesystem::path(cfg.sim.potential.source).is_absolute());
    EXPECT_DOUBLE_EQ(cfg.sim.potential.value(0.5), 0.5);
    std::filesystem::remove_all(dir);
    EXPECT_THROW(load_config("/nonexistent/run.ini"), ConfigError);
}
