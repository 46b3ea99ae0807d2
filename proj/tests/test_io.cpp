#include "ampcg/errors.hpp"
#include "ampcg/io.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ampcg;
using oracle::six_node_example;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ampcg_test_io";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(GraphJson, SixNodeExampleRoundTrip) {
    ChainGraph g = six_node_example();
    g.set_labels({"X1", "X2", "X3", "X4", "X5", "X6"});
    const auto path = scratch("g.json");
    io::write_graph(g, path);
    const auto back = io::read_graph(path);
    EXPECT_EQ(back, g);
    EXPECT_EQ(back.labels(), g.labels());
    EXPECT_EQ(io::graph_from_json(io::graph_to_json(g)), g);
}

TEST(GraphJson, RejectsCycleNamingIt) {
    const io::json j = {{"p", 3}, {"directed", {{0, 1}, {2, 0}}}, {"undirected", {{1, 2}}}};
    try {
        io::graph_from_json(j);
        FAIL() << "cycle accepted";
    } catch (const StructureError& e) {
        EXPECT_NE(std::string(e.what()).find("X1"), std::string::npos) << e.what();
    }
}

TEST(GraphJson, RejectsMalformedInput) {
    EXPECT_THROW(io::graph_from_json({{"p", 2}, {"directed", io::json::array()}, {"colour", "red"}}), InputError);
    EXPECT_THROW(io::graph_from_json({{"directed", io::json::array()}}), InputError);
    EXPECT_THROW(io::graph_from_json({{"p", 2}, {"directed", {{0, 5}}}}), InputError);
    EXPECT_THROW(io::graph_from_json({{"p", 2}, {"directed", {{0, 1}}}, {"undirected", {{0, 1}}}}), StructureError);
    EXPECT_THROW(io::graph_from_json({{"p", 2}, {"labels", {"a"}}}), InputError);
    EXPECT_THROW(io::read_graph(scratch("missing.json")), IoError);
    std::ofstream(scratch("bad.json")) << "{ not json";
    EXPECT_THROW(io::read_graph(scratch("bad.json")), InputError);
}

TEST(ParametersJson, RoundTripAndValidation) {
    const auto params = random_parameters(six_node_example(), {}, 3);
    const auto back = io::parameters_from_json(io::parameters_to_json(params));
    EXPECT_EQ(back.graph, params.graph);
    EXPECT_TRUE(back.beta.isApprox(params.beta, 1e-15));
    EXPECT_TRUE(back.sigma.isApprox(params.sigma, 1e-15));

    auto j = io::parameters_to_json(params);
    j["beta"][0][5] = 0.4;
    EXPECT_THROW(io::parameters_from_json(j), StructureError);
}

TEST(CovarianceJson, LabelsOptional) {
    Eigen::MatrixXd cov(2, 2);
    cov << 2, 1, 1, 3;
    std::vector<std::string> labels;
    EXPECT_EQ(io::covariance_from_json({{"cov", {{2, 1}, {1, 3}}}}, &labels), cov);
    EXPECT_EQ(labels, (std::vector<std::string>{"X1", "X2"}));
    const auto back = io::covariance_from_json(io::covariance_to_json(cov, {"A", "B"}), &labels);
    EXPECT_EQ(back, cov);
    EXPECT_EQ(labels, (std::vector<std::string>{"A", "B"}));
    EXPECT_THROW(io::covariance_from_json({{"cov", {{1, 2}, {3, 1}}}}), InputError);
    EXPECT_THROW(io::covariance_from_json({{"cov", {{1, 0}}}}), InputError);
}

TEST(Dataset, CsvRoundTrip) {
    GaussianDistribution dist{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
    const auto data = sample(dist, 20, 1, {"A", "B", "C"});
    const auto path = scratch("d.csv");
    io::write_dataset(data, path);
    const auto back = io::read_dataset(path);
    EXPECT_EQ(back.labels, data.labels);
    EXPECT_EQ(back.values, data.values);

    std::ofstream(scratch("ragged.csv")) << "A,B\n1,2\n3\n";
    EXPECT_THROW(io::read_dataset(scratch("ragged.csv")), InputError);
    std::ofstream(scratch("text.csv")) << "A,B\n1,x\n";
    EXPECT_THROW(io::read_dataset(scratch("text.csv")), InputError);
}

TEST(ResultJson, FitAndIdentifyFields) {
    Eigen::MatrixXd cov(2, 2);
    cov << 1, 1, 1, 2;
    ChainGraph g(2);
    g.add_directed(0, 1);
    const auto obs = Observations::from_population(cov);
    const auto f = io::fit_to_json(fit(obs, g));
    for (const char* key : {"params", "loglik", "error_variances", "iterations", "converged", "dispersion"})
        EXPECT_TRUE(f.contains(key)) << key;

    const auto single = io::identify_to_json(identify_in_class(ChainGraph(2), obs));
    EXPECT_EQ(single["margin"], "inf");
    EXPECT_EQ(single["class_size"], 1);
}
