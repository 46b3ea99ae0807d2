#include "ampcg/io.hpp"

#include "ampcg/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ampcg::io {

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw InputError(std::string("unknown field '") + key + "' in " + what);
    }
}

bool is_index(const json& v) { return v.is_number_integer() && v.get<long long>() >= 0; }

std::pair<Node, Node> edge_from_json(const json& e, std::size_t p, const char* kind) {
    if (!e.is_array() || e.size() != 2 || !is_index(e[0]) || !is_index(e[1]))
        throw InputError(std::string("malformed ") + kind + " edge " + e.dump());
    const auto a = e[0].get<Node>(), b = e[1].get<Node>();
    if (a >= p || b >= p) throw InputError(std::string(kind) + " edge " + e.dump() + " references a missing node");
    return {a, b};
}

}  // namespace

json graph_to_json(const ChainGraph& g) {
    json directed = json::array(), undirected = json::array();
    for (auto [a, b] : g.directed_edges()) directed.push_back({a, b});
    for (auto [a, b] : g.undirected_edges()) undirected.push_back({a, b});
    return {{"p", g.size()}, {"labels", g.labels()}, {"directed", directed}, {"undirected", undirected}};
}

ChainGraph graph_from_json(const json& j) {
    reject_unknown_keys(j, {"p", "labels", "directed", "undirected"}, "graph");
    if (!j.contains("p") || !is_index(j["p"])) throw InputError("graph needs a non-negative integer 'p'");
    const auto p = j["p"].get<std::size_t>();
    std::vector<std::string> labels = default_labels(p);
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) throw InputError("'labels' must be an array of strings");
        labels.clear();
        for (const auto& l : j["labels"]) {
            if (!l.is_string()) throw InputError("'labels' must be an array of strings");
            labels.push_back(l.get<std::string>());
        }
    }
    ChainGraph g(p, std::move(labels));
    for (const char* kind : {"directed", "undirected"}) {
        if (!j.contains(kind)) continue;
        if (!j[kind].is_array()) throw InputError(std::string("'") + kind + "' must be an array of pairs");
        for (const auto& e : j[kind]) {
            auto [a, b] = edge_from_json(e, p, kind);
            if (std::string(kind) == "directed") g.add_directed(a, b);
            else g.add_undirected(a, b);
        }
    }
    require_chain_graph(g);
    return g;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

ChainGraph read_graph(const std::filesystem::path& path) { return graph_from_json(read_json(path)); }

void write_graph(const ChainGraph& g, const std::filesystem::path& path) {
    write_text(path, graph_to_json(g).dump(2) + "\n");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw InputError(std::string(what) + " must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InputError(std::string(what) + " rows have unequal length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw InputError(std::string(what) + " has a non-numeric entry");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

json parameters_to_json(const SemParameters& params) {
    return {{"beta", matrix_to_json(params.beta)}, {"sigma", matrix_to_json(params.sigma)},
            {"graph", graph_to_json(params.graph)}};
}

SemParameters parameters_from_json(const json& j) {
    reject_unknown_keys(j, {"beta", "sigma", "graph"}, "parameters");
    for (const char* key : {"beta", "sigma", "graph"})
        if (!j.contains(key)) throw InputError(std::string("parameters missing '") + key + "'");
    SemParameters params{graph_from_json(j["graph"]), matrix_from_json(j["beta"], "beta"),
                         matrix_from_json(j["sigma"], "sigma")};
    validate_parameters(params);
    return params;
}

json covariance_to_json(const Eigen::MatrixXd& cov, const std::vector<std::string>& labels) {
    return {{"labels", labels}, {"cov", matrix_to_json(cov)}};
}

Eigen::MatrixXd covariance_from_json(const json& j, std::vector<std::string>* labels) {
    reject_unknown_keys(j, {"labels", "cov"}, "covariance");
    if (!j.contains("cov")) throw InputError("covariance missing 'cov'");
    Eigen::MatrixXd cov = matrix_from_json(j["cov"], "cov");
    if (cov.rows() != cov.cols()) throw InputError("covariance must be square");
    if (!cov.isApprox(cov.transpose(), 1e-12)) throw InputError("covariance must be symmetric");
    if (labels) {
        *labels = default_labels(static_cast<std::size_t>(cov.rows()));
        if (j.contains("labels")) *labels = j["labels"].get<std::vector<std::string>>();
        if (labels->size() != static_cast<std::size_t>(cov.rows())) throw InputError("label count differs from covariance size");
    }
    return cov;
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            cells.push_back(cell);
        }
        return cells;
    };

    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + " is empty");
    Dataset data;
    data.labels = split(line);
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = split(line);
        if (cells.size() != data.labels.size())
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(data.labels.size()) + " values");
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size() || c.empty() || !std::isfinite(v))
                throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad value '" + c + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(path.string() + " has no samples");
    data.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.labels.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return data;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t j = 0; j < data.labels.size(); ++j) out << (j ? "," : "") << data.labels[j];
    out << "\n";
    for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.values.cols(); ++j) out << (j ? "," : "") << data.values(i, j);
        out << "\n";
    }
    write_text(path, out.str());
}

json fit_to_json(const FitResult& fit) {
    json variances = json::array();
    for (Eigen::Index j = 0; j < fit.error_variances.size(); ++j) variances.push_back(fit.error_variances(j));
    return {{"params", parameters_to_json(fit.params)},
            {"loglik", fit.loglik},
            {"error_variances", variances},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"dispersion", fit.dispersion}};
}

json identify_to_json(const IdentifyResult& result) {
    json members = json::array();
    for (const auto& m : result.members)
        members.push_back({{"graph", graph_to_json(m.graph)},
                           {"dispersion", m.dispersion},
                           {"score", m.score},
                           {"converged", m.converged}});
    json margin = std::isinf(result.margin) ? json("inf") : json(result.margin);
    return {{"chosen", graph_to_json(result.chosen)},
            {"class_size", result.class_size},
            {"criterion", result.criterion == Criterion::Dispersion ? "dispersion" : "score"},
            {"members", members},
            {"margin", margin}};
}

}  // namespace ampcg::io
