#pragma once

// On-disk formats: JSON descriptions of trees and boundary layers, the FGTO
// binary value container, and CSV point output. IO failures throw
// std::runtime_error; malformed content throws std::invalid_argument.

#include <string>
#include <vector>

#include "boundary.hpp"
#include "quadtree.hpp"

namespace fgt {

// Tree topology with per-leaf grid samples; round-trips exactly.
std::string tree_to_json(const Tree& t);
Tree tree_from_json(const std::string& text);

std::string boundary_to_json(const BoundaryLayer& bl);
BoundaryLayer boundary_from_json(const std::string& text);

// FGTO container: "FGTO" magic, u32 version, u64 count, count doubles,
// all little-endian.
void write_fgto(const std::string& path, const double* vals, size_t n);
std::vector<double> read_fgto(const std::string& path);

// "x,y,value" rows, one per target.
void write_csv(const std::string& path, const std::vector<Vec2>& xy,
               const std::vector<double>& vals);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fgt
