#include "piranha/io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace piranha {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || errno == ERANGE)
        throw DataError("cannot parse number '" + tok + "' " + context);
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0')
        throw DataError("trailing junk after number '" + tok + "' " + context);
    return v;
}

} // namespace

Series load_series(const std::string& path, int m, PadMode pad) {
    if (m < 1) throw DataError("channel count must be >= 1");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open series file: " + path);

    std::vector<Eigen::VectorXd> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (blank) continue;

        std::vector<double> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            fields.push_back(parse_double(tok, "at " + path + ":" + std::to_string(lineno)));
        if (static_cast<int>(fields.size()) != m)
            throw DataError("expected " + std::to_string(m) + " fields, got " +
                            std::to_string(fields.size()) + " at " + path + ":" +
                            std::to_string(lineno));
        rows.emplace_back(Eigen::Map<Eigen::VectorXd>(fields.data(), m));
    }
    if (rows.size() < 2) throw DataError("series file needs at least 2 rows: " + path);
    return Series::normalize(std::move(rows), pad);
}

void write_series(const Series& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write series file: " + path);
    for (const auto& row : s.values) {
        const Eigen::VectorXd raw = s.denormalize(row);
        for (int c = 0; c < raw.size(); ++c) {
            if (c) out << ',';
            out << fmt17(raw[c]);
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

void save_weights(const Weights& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write weights file: " + path);
    out << "piranha-weights v1 " << w.n() << ' ' << w.m() << '\n';
    for (int i = 0; i < w.n(); ++i) {
        for (int j = 0; j < w.n(); ++j) out << (j ? " " : "") << fmt17(w.F(i, j));
        out << '\n';
    }
    for (int i = 0; i < w.n(); ++i) {
        for (int j = 0; j < w.m() + 1; ++j) out << (j ? " " : "") << fmt17(w.G(i, j));
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

Weights load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open weights file: " + path);
    std::string magic, version;
    int n = 0, m = 0;
    if (!(in >> magic >> version >> n >> m) || magic != "piranha-weights" || version != "v1")
        throw DataError("bad weights header in " + path);
    if (n < 1 || m < 1) throw DataError("bad dimensions in weights header of " + path);
    if (n <= m) throw ShapeError("weights header violates n > m in " + path);

    auto read_matrix = [&](int rows, int cols, const char* name) {
        Eigen::MatrixXd M(rows, cols);
        std::string tok;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                if (!(in >> tok))
                    throw DataError(std::string("truncated weights file (") + name + ") in " + path);
                M(i, j) = parse_double(tok, std::string("in ") + name + " of " + path);
            }
        return M;
    };
    Weights w;
    w.F = read_matrix(n, n, "F");
    w.G = read_matrix(n, m + 1, "G");
    check_weights(w);
    return w;
}

void write_trace(const TrainTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write trace file: " + path);
    out << "iter,objective,grad_norm,alpha,f_norm_inf,ms\n";
    for (const auto& r : trace)
        out << r.iter << ',' << fmt17(r.objective) << ',' << fmt17(r.grad_norm) << ','
            << fmt17(r.alpha) << ',' << fmt17(r.f_norm_inf) << ',' << fmt17(r.ms) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

void write_replay(const Series& x, const std::vector<Eigen::VectorXd>& predictions,
                  int t_switch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write replay file: " + path);
    const int m = x.channels();
    out << "t,phase";
    for (int c = 0; c < m; ++c) out << ",target" << c;
    for (int c = 0; c < m; ++c) out << ",prediction" << c;
    out << '\n';
    for (std::size_t t = 0; t < predictions.size(); ++t) {
        const Eigen::VectorXd target = x.denormalize(x.at(static_cast<long>(t)));
        const Eigen::VectorXd pred = x.denormalize(predictions[t]);
        out << t << ',' << (static_cast<int>(t) <= t_switch ? "teacher" : "free");
        for (int c = 0; c < m; ++c) out << ',' << fmt17(target[c]);
        for (int c = 0; c < m; ++c) out << ',' << fmt17(pred[c]);
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace piranha
