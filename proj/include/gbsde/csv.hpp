#ifndef GBSDE_CSV_HPP
#define GBSDE_CSV_HPP

#include <string>

#include "gbsde/lattice.hpp"
#include "gbsde/solver.hpp"
#include "gbsde/value_field.hpp"

namespace gbsde {

// Shortest round-trip decimal representation, '.' separator, locale-free.
// Identical doubles always give identical bytes.
std::string format_double(double v);

// One row per (slice, node), slice-major then node-ascending: t,x,value
std::string value_field_csv(const ValueField& field, const Lattice& lattice);

// Solution tables. Y/Z: t,x,value; sigma_star: t,x,sigma;
// K: t,x,sigma,delta_k with sigma ascending within a node.
std::string solution_y_csv(const GBSDESolution& sol);
std::string solution_z_csv(const GBSDESolution& sol);
std::string solution_sigma_csv(const GBSDESolution& sol);
std::string solution_k_csv(const GBSDESolution& sol);

// step,t,x,sigma,shock,Y,Z,K_cum; the terminal row leaves sigma/shock/Z empty.
std::string path_csv(const PathRecord& rec);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace gbsde

#endif
