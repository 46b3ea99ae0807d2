#include "ampcg/errors.hpp"
#include "ampcg/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ampcg;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.p = 4;
    cfg.seeds = {1, 2, 3, 4, 5, 6};
    return cfg;
}

}  // namespace

TEST(Experiment, PopulationIdentifyRecoversEverything) {
    ExperimentConfig cfg = small_config();
    cfg.p = 6;
    const auto report = run_experiment(cfg);
    ASSERT_EQ(report.rows.size(), cfg.seeds.size());
    for (const auto& row : report.rows) {
        EXPECT_TRUE(row.error.empty()) << row.error;
        EXPECT_TRUE(row.exact_match) << row.seed;
        EXPECT_EQ(row.shd, 0u);
        EXPECT_GT(row.margin, 1e-6);
    }
    EXPECT_EQ(report.recovery_rate(0), 1.0);
}

TEST(Experiment, RowsPerSeedAndSize) {
    ExperimentConfig cfg = small_config();
    cfg.n_list = {100, 1000};
    const auto report = run_experiment(cfg);
    ASSERT_EQ(report.rows.size(), 12u);
    EXPECT_EQ(report.rows[0].seed, 1u);
    EXPECT_EQ(report.rows[0].n, 100u);
    EXPECT_EQ(report.rows[1].n, 1000u);
    EXPECT_FALSE(std::isnan(report.recovery_rate(100)));
    EXPECT_TRUE(std::isnan(report.recovery_rate(0)));
}

TEST(Experiment, DeterministicAcrossExecutionModes) {
    ExperimentConfig cfg = small_config();
    cfg.n_list = {500};
    const auto serial = run_experiment(cfg, Execution::Serial);
    const auto parallel = run_experiment(cfg, Execution::Parallel);
    EXPECT_EQ(serial.to_csv(false), parallel.to_csv(false));
    EXPECT_EQ(serial.to_json(cfg, false), parallel.to_json(cfg, false));
}

TEST(Experiment, OtherMethods) {
    ExperimentConfig cfg = small_config();
    cfg.p = 3;
    cfg.method = Method::TwoPhase;
    EXPECT_EQ(run_experiment(cfg).recovery_rate(0), 1.0);
    cfg.method = Method::Greedy;
    const auto greedy = run_experiment(cfg);
    EXPECT_EQ(greedy.recovery_rate(0), 1.0);
    EXPECT_TRUE(std::isnan(greedy.rows[0].margin));
}

TEST(Experiment, WritesReports) {
    ExperimentConfig cfg = small_config();
    cfg.seeds = {7};
    cfg.output_dir = std::filesystem::temp_directory_path() / "ampcg_test_experiment";
    std::filesystem::remove_all(*cfg.output_dir);
    run_experiment(cfg);
    std::ifstream csv(*cfg.output_dir / "report.csv");
    std::stringstream text;
    text << csv.rdbuf();
    EXPECT_EQ(text.str().rfind("seed,n,true_hash,recovered_hash,exact_match,shd,margin,runtime_ms,error\n", 0), 0u);
    EXPECT_TRUE(std::filesystem::exists(*cfg.output_dir / "report.json"));
}

TEST(Experiment, Validation) {
    ExperimentConfig cfg;
    EXPECT_THROW(run_experiment(cfg), InputError);
    cfg.seeds = {1};
    cfg.sigma2 = 0.0;
    EXPECT_THROW(run_experiment(cfg), InputError);
}

TEST(ExperimentConfig, StrictJson) {
    const auto cfg = experiment_config_from_json(
        {{"p", 4}, {"seeds", {1, 2}}, {"n_list", {100}}, {"method", "two-phase"}, {"sigma2", 2.0}});
    EXPECT_EQ(cfg.p, 4u);
    EXPECT_EQ(cfg.seeds.size(), 2u);
    EXPECT_EQ(cfg.method, Method::TwoPhase);
    EXPECT_EQ(cfg.sigma2, 2.0);
    EXPECT_THROW(experiment_config_from_json({{"p", 4}, {"extra", 1}}), InputError);
    EXPECT_THROW(experiment_config_from_json({{"method", "annealing"}}), InputError);
    EXPECT_THROW(experiment_config_from_json({{"p", "four"}}), InputError);
}

TEST(MakeProblem, RescaledAndFaithful) {
    ExperimentConfig cfg = small_config();
    cfg.sigma2 = 2.5;
    const auto problem = make_problem(cfg, 11);
    for (Eigen::Index j = 0; j < problem.params.sigma.rows(); ++j) EXPECT_EQ(problem.params.sigma(j, j), 2.5);
    EXPECT_TRUE(check_faithfulness(problem.graph, problem.cov).ok());
}
