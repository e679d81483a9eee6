#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace qamp::cli {

struct FigureJob {
  std::string file;
  std::vector<std::string> args;  // CLI arguments, without --output
};

// Every data file behind the figures and the vMF table, at default resolution.
std::vector<FigureJob> figure_suite();

// Runs the suite into dir. Returns the number of failed jobs.
int write_figure_suite(const std::filesystem::path& dir, std::ostream& log);

}  // namespace qamp::cli
