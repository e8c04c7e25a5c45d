#include "liqsched/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace liqsched {

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::BadConfig, "cannot write " + path.string());
    os << text;
}

namespace {

template <class Row>
std::string rows_by_time(const std::vector<double>& t, const std::vector<double>& tau,
                         double T, const Row& row) {
    std::ostringstream os;
    double last_t = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const bool terminal = tau[i] == 0.0;
        if (!terminal && (t[i] <= last_t || t[i] >= T)) continue;
        row(os, i);
        last_t = t[i];
    }
    return os.str();
}

}  // namespace

void write_riccati_csv(const std::filesystem::path& path, const RiccatiSolution& sol) {
    const auto& g = sol.grid();
    std::string body = "t,A,B,C,D,E\n";
    body += rows_by_time(g.t, g.tau, g.T, [&](std::ostream& os, std::size_t i) {
        os << format_double(g.t[i]) << ',' << format_double(sol.A()[i]) << ','
           << format_double(sol.B()[i]) << ',' << format_double(sol.C()[i]) << ','
           << format_double(sol.D()[i]) << ',' << format_double(sol.E()[i]) << '\n';
    });
    write_text(path, body);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr) {
    const double T = tr.t.empty() ? 0.0 : tr.t.back();
    std::string body = "t,X,Y,xi\n";
    body += rows_by_time(tr.t, tr.tau, T, [&](std::ostream& os, std::size_t i) {
        os << format_double(tr.t[i]) << ',' << format_double(tr.X[i]) << ','
           << format_double(tr.Y[i]) << ',' << format_double(tr.xi[i]) << '\n';
    });
    write_text(path, body);
}

void write_discrete_csv(const std::filesystem::path& path, const DiscreteStrategy& ds) {
    std::ostringstream os;
    os << "k,t_k,xi_k,X_k,Y_k\n";
    for (std::size_t k = 0; k < ds.t.size(); ++k) {
        os << k << ',' << format_double(ds.t[k]) << ','
           << (k < ds.xi.size() ? format_double(ds.xi[k]) : std::string()) << ','
           << format_double(ds.X_path[k]) << ',' << format_double(ds.Y_path[k]) << '\n';
    }
    write_text(path, os.str());
}

namespace {

double parse_field(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::BadConfig, "unparsable number '" + s + "' in CSV");
    }
    return v;
}

}  // namespace

RiccatiTable read_riccati_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::BadConfig, "cannot read " + path.string());
    std::string line;
    std::getline(is, line);
    if (line.rfind("t,A,B,C,D,E", 0) != 0) {
        throw Error(ErrorCode::BadConfig, "riccati CSV header must be t,A,B,C,D,E");
    }
    RiccatiTable tab;
    std::vector<double>* cols[] = {&tab.t, &tab.A, &tab.B, &tab.C, &tab.D, &tab.E};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (auto* col : cols) {
            if (!std::getline(ss, cell, ',')) {
                throw Error(ErrorCode::BadConfig, "short row in riccati CSV");
            }
            col->push_back(parse_field(cell));
        }
    }
    return tab;
}

RiccatiSolution solution_from_table(const ModelParams& model, const RiccatiTable& tab,
                                    double min_tau) {
    const double T = model.horizon_T;
    TimeGrid g;
    g.T = T;
    std::vector<double> a, b, c;
    for (std::size_t i = 0; i < tab.t.size(); ++i) {
        const double tau = T - tab.t[i];
        if (tau < min_tau) continue;
        g.t.push_back(tab.t[i]);
        g.tau.push_back(tau);
        a.push_back(tab.A[i] - model.eta / tau);
        b.push_back(tab.B[i] - 1.0);
        c.push_back(tab.C[i]);
    }
    if (g.t.size() < 2) throw Error(ErrorCode::BadConfig, "riccati CSV has too few rows");
    g.t0 = g.t.front();
    g.sing_window = g.tau.back();
    g.window_begin = g.tau.size() - 1;
    g.t.push_back(T);
    g.tau.push_back(0.0);
    // Terminal limits of the excess parts.
    a.push_back(a.back());
    b.push_back(0.0);
    c.push_back(0.0);
    return RiccatiSolution(model, std::move(g), std::move(a), std::move(b), std::move(c));
}

}  // namespace liqsched
