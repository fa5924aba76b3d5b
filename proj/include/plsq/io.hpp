#pragma once
// JSON and CSV instance I/O.
//
// Instance format: {"dims":[nx,ny,nz],"triples":[[x,y,z],...]} with triples
// sorted lexicographically on output, so save/load round-trips bit-exactly.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plsq/common.hpp"
#include "plsq/pls.hpp"

namespace plsq {

inline constexpr const char* kVersion = "0.1.0";

// Provenance block embedded in every emitted artifact.  A run is
// reproducible from this block alone.
struct RunConfig {
    std::string command;
    std::string input;  // instance path or generator spec
    std::string out;
    u64 seed = 0;
    u64 budget = 0;
    unsigned threads = 1;
};

inline nlohmann::json to_json(const RunConfig& rc) {
    return nlohmann::json{{"tool", "plsq"},       {"version", kVersion},
                          {"command", rc.command}, {"input", rc.input},
                          {"out", rc.out},         {"seed", rc.seed},
                          {"budget", rc.budget},   {"threads", rc.threads}};
}

inline nlohmann::json pls_to_json(const Pls& a) {
    nlohmann::json triples = nlohmann::json::array();
    for (const Cell& c : a.cells) triples.push_back({c.x, c.y, c.z});
    return nlohmann::json{{"dims", {a.dims.nx, a.dims.ny, a.dims.nz}}, {"triples", triples}};
}

inline Pls pls_from_json(const nlohmann::json& j) {
    if (!j.contains("dims") || !j.contains("triples"))
        throw input_error("instance JSON needs \"dims\" and \"triples\"");
    const auto& jd = j.at("dims");
    if (!jd.is_array() || jd.size() != 3) throw input_error("\"dims\" must be [nx,ny,nz]");
    Dims dims{jd.at(0).get<int>(), jd.at(1).get<int>(), jd.at(2).get<int>()};
    if (dims.nx < 0 || dims.ny < 0 || dims.nz < 0) throw input_error("dims must be nonnegative");
    std::vector<Cell> cells;
    for (const auto& jt : j.at("triples")) {
        if (!jt.is_array() || jt.size() != 3) throw input_error("triples must be [x,y,z] arrays");
        cells.push_back({jt.at(0).get<int>(), jt.at(1).get<int>(), jt.at(2).get<int>()});
    }
    return Pls(dims, std::move(cells));
}

inline void save_pls(const Pls& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << pls_to_json(a).dump() << "\n";
}

inline Pls load_pls(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("bad JSON in " + path + ": " + e.what());
    }
    return pls_from_json(j);
}

// One cell per line, "x,y,z", in sorted order.
inline std::string pls_to_csv(const Pls& a) {
    std::ostringstream out;
    for (const Cell& c : a.cells) out << c.x << "," << c.y << "," << c.z << "\n";
    return out.str();
}

inline Pls pls_from_csv(std::istream& in, const Dims& dims) {
    std::vector<Cell> cells;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Cell c;
        char c1 = 0, c2 = 0;
        std::istringstream row(line);
        if (!(row >> c.x >> c1 >> c.y >> c2 >> c.z) || c1 != ',' || c2 != ',')
            throw input_error("bad CSV line: " + line);
        cells.push_back(c);
    }
    return Pls(dims, std::move(cells));
}

}  // namespace plsq
