#include "negcall/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace negcall {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

std::string format_index(std::size_t v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_nodes_csv_header(std::ostream& os) {
    os << "path_id,node,t,tau,s1,c,m,s2,stopped\n";
}

void append_nodes_csv_rows(std::ostream& os, const MarketPath& mp, std::size_t path_id) {
    const TimeGrid& g = *mp.grid;
    for (std::size_t k = 0; k < mp.s1.size(); ++k) {
        const bool stopped_here = mp.stop_index && k >= *mp.stop_index;
        os << format_index(path_id) << ',' << format_index(k) << ',' << format_double(g.t[k])
           << ',' << format_double(g.tau[k]) << ',' << format_double(mp.s1[k]) << ','
           << format_double(mp.c[k]) << ',' << format_double(mp.m[k]) << ','
           << format_double(mp.s2[k]) << ',' << (stopped_here ? '1' : '0') << '\n';
    }
}

void write_paths_csv_header(std::ostream& os) {
    os << "path_id,stopped,stop_index,d,terminal_s2,min_m\n";
}

void append_paths_csv_row(std::ostream& os, const MarketPath& mp, std::size_t path_id) {
    os << format_index(path_id) << ',' << (mp.stopped ? '1' : '0') << ',';
    if (mp.stop_index) os << format_index(*mp.stop_index);
    const double min_m = *std::min_element(mp.m.begin(), mp.m.end());
    os << ',' << format_double(mp.d) << ',' << format_double(mp.s2.back()) << ','
       << format_double(min_m) << '\n';
}

void write_ensemble_nodes_csv(std::ostream& os, std::span<const MarketPath> paths,
                              std::size_t first_path_id) {
    write_nodes_csv_header(os);
    for (std::size_t p = 0; p < paths.size(); ++p)
        append_nodes_csv_rows(os, paths[p], first_path_id + p);
}

void write_ensemble_paths_csv(std::ostream& os, std::span<const MarketPath> paths,
                              std::size_t first_path_id) {
    write_paths_csv_header(os);
    for (std::size_t p = 0; p < paths.size(); ++p)
        append_paths_csv_row(os, paths[p], first_path_id + p);
}

void write_node_means_csv(std::ostream& os, const TimeGrid& grid, const NodeMeans& means) {
    os << "node,t,tau,s1_mean,s1_se,m_mean,m_se,s2_mean,s2_se\n";
    for (std::size_t k = 0; k < means.s1_mean.size(); ++k) {
        os << format_index(k) << ',' << format_double(grid.t[k]) << ','
           << format_double(grid.tau[k]) << ',' << format_double(means.s1_mean[k]) << ','
           << format_double(means.s1_se[k]) << ',' << format_double(means.m_mean[k]) << ','
           << format_double(means.m_se[k]) << ',' << format_double(means.s2_mean[k]) << ','
           << format_double(means.s2_se[k]) << '\n';
    }
}

}  // namespace negcall
