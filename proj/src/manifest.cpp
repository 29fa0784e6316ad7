#include "zigzag/manifest.hpp"

#include <fstream>
#include <sstream>

#include "zigzag/error.hpp"
#include "zigzag/numerics.hpp"

namespace zz {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    int x = 0;
    try {
        x = std::stoi(v, &used);
    } catch (...) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw Error(ErrorKind::Validation, "manifest key '" + key + "' expects an integer");
    return x;
}

}  // namespace

std::map<std::string, std::string> parse_manifest(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Validation, "manifest line " + std::to_string(lineno) + ": missing '='");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw Error(ErrorKind::Validation, "manifest line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot read manifest '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_manifest(ss.str());
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_angle(item));
    }
    if (out.empty()) throw Error(ErrorKind::Validation, "empty list '" + s + "'");
    return out;
}

void apply_manifest(const std::map<std::string, std::string>& kv, SweepPlan& plan) {
    WellShape shape = plan.cfg.well.shape;
    double r0 = plan.cfg.well.r0;
    for (const auto& [k, v] : kv) {
        if (k == "well") shape = parse_well_shape(v);
        else if (k == "r0") r0 = parse_angle(v);
        else if (k == "lambda") plan.lambdas = parse_list(v);
        else if (k == "kpar") plan.kpars = parse_list(v);
        else if (k == "ncells") plan.cfg.ncells = to_int(k, v);
        else if (k == "resolution") plan.cfg.resolution = to_int(k, v);
        else if (k == "pad_left") plan.cfg.pad_left = to_int(k, v);
        else if (k == "pad_right") plan.cfg.pad_right = to_int(k, v);
        else if (k == "nev") plan.cfg.nev = to_int(k, v);
        else if (k == "closure") plan.cfg.closure = parse_closure(v);
        else if (k == "eig_tol") plan.cfg.eig_tol = parse_angle(v);
        else throw Error(ErrorKind::Validation, "unknown manifest key '" + k + "'");
    }
    plan.cfg.well = make_well(shape, r0);
    for (double l : plan.lambdas)
        if (!(l > 0)) throw Error(ErrorKind::Validation, "lambda values must be positive");
    if (plan.cfg.ncells < 2) throw Error(ErrorKind::Validation, "ncells must be >= 2");
    if (plan.cfg.resolution < 8) throw Error(ErrorKind::Validation, "resolution must be >= 8");
    if (plan.cfg.nev < 0) throw Error(ErrorKind::Validation, "nev must be >= 0");
    if (!(plan.cfg.eig_tol > 0)) throw Error(ErrorKind::Validation, "eig_tol must be positive");
}

}  // namespace zz
