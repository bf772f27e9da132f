#pragma once

#include <string>
#include <vector>

#include "dmr/reflected.hpp"
#include "dmr/skorokhod.hpp"

namespace dmr {

// Shortest-exact formatting so exports round-trip bit for bit.
std::string format_double(double v);

// Deterministic part of a reflected solution: t,K,KR,KL,EL,ER.
void write_deterministic_csv(const std::string& path,
                             const ReflectedSolution& solution,
                             const std::vector<double>& mean_L,
                             const std::vector<double>& mean_R);

// Particle fields: t,particle,Y,Z_1..Z_d.
void write_particles_csv(const std::string& path, const BackwardSolution& solution);

// Skorokhod path I/O: t,s for inputs and t,x,K,Kr,Kl for solutions.
void write_input_path_csv(const std::string& path, const InputPath& input);
InputPath read_input_path_csv(const std::string& path);
void write_skorokhod_csv(const std::string& path, const SkorokhodSolution& solution);

struct DeterministicTable {
    std::vector<double> t, K, KR, KL, EL, ER;
};
DeterministicTable read_deterministic_csv(const std::string& path);

struct ParticleTable {
    std::vector<double> t;          // node times, deduplicated
    std::size_t n_particles = 0;
    std::size_t d = 1;
    std::vector<double> Y;          // node-major
    std::vector<double> Z;          // node-major, d per particle
};
ParticleTable read_particles_csv(const std::string& path);

}  // namespace dmr
