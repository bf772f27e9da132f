#include "dmr/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dmr/errors.hpp"

namespace dmr {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return {buf, ptr};
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("io: cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("io: cannot open: " + path);
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

double parse_field(const std::string& s, const std::string& path) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("io: bad numeric field '" + s + "' in " + path);
    return v;
}

void expect_header(std::ifstream& in, const std::string& expected,
                   const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("io: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.starts_with(expected))
        throw ParseError("io: unexpected header in " + path + ": " + line);
}

}  // namespace

void write_deterministic_csv(const std::string& path,
                             const ReflectedSolution& solution,
                             const std::vector<double>& mean_L,
                             const std::vector<double>& mean_R) {
    auto out = open_out(path);
    out << "t,K,KR,KL,EL,ER\n";
    for (std::size_t k = 0; k < solution.K.size(); ++k) {
        out << format_double(solution.backward.grid.t(k)) << ','
            << format_double(solution.K[k]) << ',' << format_double(solution.KR[k])
            << ',' << format_double(solution.KL[k]) << ','
            << format_double(mean_L[k]) << ',' << format_double(mean_R[k]) << '\n';
    }
}

void write_particles_csv(const std::string& path, const BackwardSolution& solution) {
    auto out = open_out(path);
    out << "t,particle,Y";
    for (std::size_t c = 1; c <= solution.d; ++c) out << ",Z_" << c;
    out << '\n';
    for (std::size_t k = 0; k < solution.grid.n_nodes(); ++k) {
        const std::string t = format_double(solution.grid.t(k));
        for (std::size_t i = 0; i < solution.n_particles; ++i) {
            out << t << ',' << i << ',' << format_double(solution.y(k, i));
            const auto z = solution.z(k, i);
            for (std::size_t c = 0; c < solution.d; ++c)
                out << ',' << format_double(z[c]);
            out << '\n';
        }
    }
}

void write_input_path_csv(const std::string& path, const InputPath& input) {
    auto out = open_out(path);
    out << "t,s\n";
    for (std::size_t k = 0; k < input.values.size(); ++k)
        out << format_double(input.grid.t(k)) << ','
            << format_double(input.values[k]) << '\n';
}

InputPath read_input_path_csv(const std::string& path) {
    auto in = open_in(path);
    expect_header(in, "t,s", path);
    std::vector<double> t, s;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2) throw ParseError("io: bad row in " + path);
        t.push_back(parse_field(fields[0], path));
        s.push_back(parse_field(fields[1], path));
    }
    if (t.size() < 2) throw ParseError("io: too few rows in " + path);
    InputPath input;
    input.grid = TimeGrid(t.back(), t.size() - 1);
    input.values = std::move(s);
    return input;
}

void write_skorokhod_csv(const std::string& path, const SkorokhodSolution& solution) {
    auto out = open_out(path);
    out << "t,x,K,Kr,Kl\n";
    for (std::size_t k = 0; k < solution.x.size(); ++k) {
        out << format_double(solution.grid.t(k)) << ','
            << format_double(solution.x[k]) << ',' << format_double(solution.K[k])
            << ',' << format_double(solution.Kr[k]) << ','
            << format_double(solution.Kl[k]) << '\n';
    }
}

DeterministicTable read_deterministic_csv(const std::string& path) {
    auto in = open_in(path);
    expect_header(in, "t,K,KR,KL,EL,ER", path);
    DeterministicTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 6) throw ParseError("io: bad row in " + path);
        table.t.push_back(parse_field(fields[0], path));
        table.K.push_back(parse_field(fields[1], path));
        table.KR.push_back(parse_field(fields[2], path));
        table.KL.push_back(parse_field(fields[3], path));
        table.EL.push_back(parse_field(fields[4], path));
        table.ER.push_back(parse_field(fields[5], path));
    }
    if (table.t.size() < 2) throw ParseError("io: too few rows in " + path);
    return table;
}

ParticleTable read_particles_csv(const std::string& path) {
    auto in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("io: empty file: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (!header.starts_with("t,particle,Y"))
        throw ParseError("io: unexpected header in " + path + ": " + header);
    const std::size_t n_fields = split_csv(header).size();
    if (n_fields < 4) throw ParseError("io: missing Z columns in " + path);
    const std::size_t d = n_fields - 3;

    ParticleTable table;
    table.d = d;
    std::string line;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3 + d) throw ParseError("io: bad row in " + path);
        times.push_back(parse_field(fields[0], path));
        table.Y.push_back(parse_field(fields[2], path));
        for (std::size_t c = 0; c < d; ++c)
            table.Z.push_back(parse_field(fields[3 + c], path));
    }
    if (times.empty()) throw ParseError("io: too few rows in " + path);

    std::size_t n_particles = 1;
    while (n_particles < times.size() && times[n_particles] == times[0]) ++n_particles;
    if (times.size() % n_particles != 0)
        throw ParseError("io: ragged particle blocks in " + path);
    table.n_particles = n_particles;
    for (std::size_t k = 0; k < times.size(); k += n_particles)
        table.t.push_back(times[k]);
    return table;
}

}  // namespace dmr
