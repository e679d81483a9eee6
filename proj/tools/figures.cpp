#include "figures.hpp"

#include <sstream>

#include "cli.hpp"

namespace qamp::cli {

namespace {

const char* const kThetas[][2] = {{"0.5", "theta0.5"}, {"0.4", "theta0.4"}, {"0.333333333333333333", "theta0.333"},
                                  {"0.25", "theta0.25"}};
const char* const kKappas[] = {"0", "1", "3", "10"};
const char* const kAverageGains[] = {"3", "10", "20", "inf"};

std::string surface_gains() {
  std::string out;
  for (int db = 0; db <= 20; ++db) out += std::to_string(db) + ",";
  return out + "inf";
}

}  // namespace

std::vector<FigureJob> figure_suite() {
  std::vector<FigureJob> jobs;
  jobs.push_back({"table_vmf.csv", {"table-vmf", "--kappas", "0,1,3,10"}});
  for (const auto& [theta, tag] : kThetas) {
    jobs.push_back({std::string("curve_inf_") + tag + ".csv", {"curve", "--theta", theta, "--gain", "inf"}});
  }
  const std::string gains = surface_gains();
  for (const auto& [theta, tag] : kThetas) {
    jobs.push_back({std::string("surface_") + tag + ".csv",
                    {"sweep", "--surface", "--theta", theta, "--gains", gains, "--f-points", "101"}});
    jobs.push_back({std::string("threshold_") + tag + ".csv", {"threshold", "--theta", theta, "--gains", gains}});
  }
  for (const char* kappa : kKappas) {
    for (const char* g : kAverageGains) {
      jobs.push_back({std::string("curve_kappa") + kappa + "_g" + g + ".csv", {"curve", "--kappa", kappa, "--gain", g}});
    }
  }
  jobs.push_back({"merit.csv", {"merit", "--kappas", "0,1,3,10,1000", "--gains", "3,10,20,inf"}});
  return jobs;
}

int write_figure_suite(const std::filesystem::path& dir, std::ostream& log) {
  std::filesystem::create_directories(dir);
  int failures = 0;
  for (const auto& job : figure_suite()) {
    auto args = job.args;
    args.push_back("--output");
    args.push_back((dir / job.file).string());
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    log << job.file << (code == 0 ? "" : " FAILED: " + err.str()) << "\n";
    if (code != 0) ++failures;
  }
  return failures;
}

}  // namespace qamp::cli
