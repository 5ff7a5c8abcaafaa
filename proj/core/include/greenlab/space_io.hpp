#pragma once

#include <string>

#include "greenlab/space.hpp"

namespace greenlab {

// Space files carry {"n","h","generator","alpha","vertices","edges"} with
// vertices as {id,coords,measure} and edges as [i,j,len] triples. The
// metric mode is implied by the generator: grids measure distance in the
// ambient coordinates, everything else through the graph.
MetricMeasureSpace load_space(const std::string& path);
void save_space(const MetricMeasureSpace& X, const std::string& path);

// Atomic text write: temp file in the same directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace greenlab
