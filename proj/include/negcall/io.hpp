#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "negcall/economy.hpp"

namespace negcall {

/// Shortest-exact decimal forms for report files: floats carry 17 significant
/// digits so a reader recovers the exact double.
std::string format_double(double v);
std::string format_index(std::size_t v);

/// Node-level ensemble export: one row per (path, node) with columns
/// path_id,node,t,tau,s1,c,m,s2,stopped.
void write_ensemble_nodes_csv(std::ostream& os, std::span<const MarketPath> paths,
                              std::size_t first_path_id = 0);

/// Path-level ensemble export: one row per path with columns
/// path_id,stopped,stop_index,d,terminal_s2,min_m.
void write_ensemble_paths_csv(std::ostream& os, std::span<const MarketPath> paths,
                              std::size_t first_path_id = 0);

/// Streaming forms of the two exports (header once, then rows path by path);
/// the span writers above are implemented with these.
void write_nodes_csv_header(std::ostream& os);
void append_nodes_csv_rows(std::ostream& os, const MarketPath& mp, std::size_t path_id);
void write_paths_csv_header(std::ostream& os);
void append_paths_csv_row(std::ostream& os, const MarketPath& mp, std::size_t path_id);

/// Per-node mean/standard-error table for an ensemble.
void write_node_means_csv(std::ostream& os, const TimeGrid& grid, const NodeMeans& means);

}  // namespace negcall
