#include "greenlab/space_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "greenlab/errors.hpp"

namespace greenlab {

using nlohmann::json;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write file: " + tmp);
        out << content;
        if (!out.flush()) throw InvalidInput("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw InvalidInput("cannot move file into place: " + path);
}

MetricMeasureSpace load_space(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw InvalidSpace(std::string("space file is not valid JSON: ") + e.what());
    }
    try {
        MetricMeasureSpace X;
        X.dim = j.at("n").get<int>();
        X.h = j.at("h").get<double>();
        X.generator = j.at("generator").get<std::string>();
        X.alpha = j.at("alpha").get<double>();
        X.metricMode = X.generator == "grid" ? MetricMode::AmbientEuclidean
                                             : MetricMode::GraphGeodesic;

        const auto& verts = j.at("vertices");
        X.coords.resize(verts.size(), {0.0, 0.0, 0.0});
        X.measure.resize(verts.size(), 0.0);
        for (const auto& v : verts) {
            const int id = v.at("id").get<int>();
            if (id < 0 || std::size_t(id) >= verts.size())
                throw InvalidSpace("vertex id out of range");
            const auto& c = v.at("coords");
            if (int(c.size()) != X.dim)
                throw InvalidSpace("coordinate arity disagrees with n");
            for (int k = 0; k < X.dim; ++k)
                X.coords[id][std::size_t(k)] = c.at(std::size_t(k)).get<double>();
            X.measure[id] = v.at("measure").get<double>();
        }
        for (const auto& e : j.at("edges")) {
            if (e.size() != 3) throw InvalidSpace("edge rows must be [i,j,len]");
            Edge edge;
            edge.a = e.at(0).get<int>();
            edge.b = e.at(1).get<int>();
            edge.len = e.at(2).get<double>();
            if (edge.a > edge.b) std::swap(edge.a, edge.b);
            X.edges.push_back(edge);
        }
        X.finalize();
        return X;
    } catch (const json::exception& e) {
        throw InvalidSpace(std::string("space file schema mismatch: ") + e.what());
    }
}

void save_space(const MetricMeasureSpace& X, const std::string& path) {
    json j;
    j["n"] = X.dim;
    j["h"] = X.h;
    j["generator"] = X.generator;
    j["alpha"] = X.alpha;
    json verts = json::array();
    for (int v = 0; v < X.vertexCount(); ++v) {
        json coords = json::array();
        for (int k = 0; k < X.dim; ++k) coords.push_back(X.coords[v][std::size_t(k)]);
        verts.push_back(
            {{"id", v}, {"coords", coords}, {"measure", X.measure[v]}});
    }
    j["vertices"] = std::move(verts);
    json edges = json::array();
    for (const Edge& e : X.edges) edges.push_back({e.a, e.b, e.len});
    j["edges"] = std::move(edges);
    write_text_atomic(path, j.dump());
}

}  // namespace greenlab
