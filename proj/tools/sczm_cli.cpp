#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "sczm/classify.hpp"
#include "sczm/config.hpp"
#include "sczm/conformalize.hpp"
#include "sczm/errors.hpp"
#include "sczm/io_util.hpp"
#include "sczm/mms.hpp"
#include "sczm/solver.hpp"
#include "sczm/surrogate.hpp"

namespace fs = std::filesystem;
using namespace sczm;

namespace {

std::vector<Vec2> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<Vec2> pts;
  double x, y;
  while (in >> x >> y) pts.emplace_back(x, y);
  return pts;
}

int run_classify(const std::string& boundary_path, const std::string& points_path,
                 const std::string& out_path, bool brute) {
  const BoundaryRep2 boundary = read_boundary2(boundary_path);
  const std::vector<Vec2> points = read_points(points_path);
  CsvWriter csv(out_path);
  csv.header({"x", "y", "sideness"});
  if (brute) {
    for (const Vec2& p : points)
      csv.row({fmt_double(p.x()), fmt_double(p.y()),
               to_string(classify_brute_force<2>(p, boundary))});
  } else {
    const auto basis = compute_boundary_pca<2>(boundary.vertices);
    const auto index = build_classifier_index<2>(basis, boundary);
    for (const Vec2& p : points)
      csv.row({fmt_double(p.x()), fmt_double(p.y()),
               to_string(classify_point<2>(p, boundary, index))});
  }
  return 0;
}

int run_assign(const std::string& mesh_path, const std::string& grains_path,
               const std::string& out_path) {
  Mesh mesh = read_mesh(mesh_path);
  const GrainSet grains = read_grains(grains_path);
  mesh.region_id = assign_grain_ids(mesh, grains);
  write_mesh(mesh, out_path);
  return 0;
}

int run_solve(const std::string& config_path) {
  Config cfg = Config::parse_file(config_path);
  SolveSetup setup = build_solve_setup(cfg);
  fs::create_directories(setup.output_dir);

  const RunResult run = run_load_stepping(setup.problem);

  CsvWriter csv((fs::path(setup.output_dir) / "steps.csv").string());
  std::vector<std::string> header = {"t", "imposed"};
  std::vector<std::string> tags;
  if (!run.records.empty())
    for (const auto& [tag, r] : run.records.front().reactions) tags.push_back(tag);
  for (const auto& tag : tags) {
    header.push_back("R_" + tag + "_x");
    header.push_back("R_" + tag + "_y");
  }
  header.push_back("max_damage");
  header.push_back("incremental_work");
  csv.header(header);
  for (const StepRecord& rec : run.records) {
    std::vector<double> row = {rec.t, rec.imposed};
    for (const auto& tag : tags) {
      row.push_back(rec.reactions.at(tag).x());
      row.push_back(rec.reactions.at(tag).y());
    }
    row.push_back(rec.max_damage);
    row.push_back(rec.incremental_work);
    csv.row(row);
  }

  if (!setup.field_output_times.empty()) {
    // rerun times are matched to recorded steps
    std::cerr << "note: field output written for the final state only\n";
  }
  const NodalField uf = displacement_field(setup.problem, run.u);
  write_field(uf, (fs::path(setup.output_dir) / "displacement.txt").string());
  write_mesh(setup.problem.mesh, (fs::path(setup.output_dir) / "mesh_split.txt").string());

  if (run.failed) {
    std::cerr << "step failure at t = " << run.failed_at_t << " after "
              << run.failure_log.size() - 1 << " Newton iterations\n";
    throw SolverError("load stepping failed at t = " + std::to_string(run.failed_at_t));
  }
  std::cout << "energy_release " << fmt_double(energy_release(run.records)) << "\n";
  return 0;
}

int run_mms(const std::string& case_name, const std::string& levels_arg,
            const std::string& out_path) {
  MmsKind kind;
  if (case_name == "quadratic")
    kind = MmsKind::QuadraticJump;
  else if (case_name == "linear")
    kind = MmsKind::LinearJump;
  else
    throw ConfigError("--case must be quadratic or linear");

  std::vector<int> levels;
  const auto dots = levels_arg.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(levels_arg.substr(0, dots));
    const int hi = std::stoi(levels_arg.substr(dots + 2));
    for (int l = lo; l <= hi; ++l) levels.push_back(l);
  } else {
    levels.push_back(std::stoi(levels_arg));
  }

  const ConvergenceTable table = convergence_study(kind, levels);
  CsvWriter csv(out_path);
  csv.header({"h_omega", "error_sczm", "error_no_sczm", "local_slope"});
  for (const ConvergenceRow& r : table.rows)
    csv.row(std::vector<double>{r.h, r.error_sczm, r.error_no_sczm, r.local_slope});
  std::cout << "slope_sczm " << fmt_double(table.slope_sczm) << "\n";
  std::cout << "slope_no_sczm " << fmt_double(table.slope_no_sczm) << "\n";
  return 0;
}

int run_conformalize(const std::string& mesh_path, const std::string& grains_path,
                     const std::string& out_path) {
  const Mesh mesh = read_mesh(mesh_path);
  const GrainSet grains = read_grains(grains_path);
  const IFMMesh ifm = conformalize(mesh, grains);
  write_ifm(ifm, out_path);
  return 0;
}

int run_project(const std::string& ifm_path, const std::string& source_path,
                const std::string& field_path, const std::string& out_path) {
  const IFMMesh ifm = read_ifm(ifm_path);
  const Mesh source = read_mesh(source_path);
  const NodalField field = read_field(field_path);
  write_field(project_solution(ifm, source, field), out_path);
  return 0;
}

int run_bench(const std::string& sizes_arg, int grid, int runs, const std::string& out_path) {
  std::vector<int> sizes;
  std::istringstream in(sizes_arg);
  std::string item;
  while (std::getline(in, item, ',')) sizes.push_back(std::stoi(item));

  // query points: nodes of a uniform grid over the airfoil's bounding area
  std::vector<Vec2> queries;
  for (int j = 0; j <= grid; ++j)
    for (int i = 0; i <= grid; ++i)
      queries.emplace_back(-0.25 + 1.5 * i / grid, -0.75 + 1.5 * j / grid);

  const auto rows = benchmark_classification(
      sizes, [](int n) { return make_airfoil(n); }, queries, runs);
  CsvWriter csv(out_path);
  csv.header({"n_facets", "runtime_pca", "runtime_brute", "speedup"});
  for (const BenchRow& r : rows)
    csv.row(std::vector<double>{static_cast<double>(r.n_facets), r.runtime_pca, r.runtime_brute,
                                r.speedup});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shifted cohesive-zone laboratory"};
  app.require_subcommand(1);

  auto* classify_cmd = app.add_subcommand("classify", "Classify points against a boundary");
  std::string boundary_path, points_path, out_path = "classify.csv";
  bool brute = false;
  classify_cmd->add_option("--boundary", boundary_path, "boundary file")->required();
  classify_cmd->add_option("--points", points_path, "points file, one 'x y' per line")->required();
  classify_cmd->add_option("--out", out_path, "output CSV");
  classify_cmd->add_flag("--brute-force", brute, "use the full-scan oracle");

  auto* assign_cmd = app.add_subcommand("assign", "Assign dominant-volume grain ids");
  std::string mesh_path, grains_path, assign_out = "assigned.txt";
  assign_cmd->add_option("--mesh", mesh_path, "mesh file")->required();
  assign_cmd->add_option("--grains", grains_path, "grain file")->required();
  assign_cmd->add_option("--out", assign_out, "output mesh file");

  auto* solve_cmd = app.add_subcommand("solve", "Run a quasi-static cohesive solve");
  std::string config_path;
  solve_cmd->add_option("--config", config_path, "configuration file")->required();

  auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution convergence study");
  std::string mms_case = "quadratic", levels = "3..6", mms_out = "mms_convergence.csv";
  mms_cmd->add_option("--case", mms_case, "quadratic | linear");
  mms_cmd->add_option("--levels", levels, "level range, e.g. 3..6");
  mms_cmd->add_option("--out", mms_out, "output CSV");

  auto* conf_cmd = app.add_subcommand("conformalize", "Conformalize a mesh to grain regions");
  std::string conf_mesh, conf_grains, conf_out = "ifm.txt";
  conf_cmd->add_option("--mesh", conf_mesh, "mesh file")->required();
  conf_cmd->add_option("--grains", conf_grains, "grain file")->required();
  conf_cmd->add_option("--out", conf_out, "output IFM file")->required();

  auto* proj_cmd = app.add_subcommand("project", "Project a field onto an IFM mesh");
  std::string proj_ifm, proj_source, proj_field, proj_out = "projected.txt";
  proj_cmd->add_option("--ifm", proj_ifm, "IFM file")->required();
  proj_cmd->add_option("--source", proj_source, "source mesh file")->required();
  proj_cmd->add_option("--field", proj_field, "field file")->required();
  proj_cmd->add_option("--out", proj_out, "output field file")->required();

  auto* bench_cmd = app.add_subcommand("bench-classify", "Classification runtime benchmark");
  std::string sizes = "100,400,1600", bench_out = "classify_bench.csv";
  int grid = 256, runs = 5;
  bench_cmd->add_option("--sizes", sizes, "boundary facet counts, comma separated");
  bench_cmd->add_option("--grid", grid, "query grid resolution");
  bench_cmd->add_option("--runs", runs, "repetitions per timing");
  bench_cmd->add_option("--out", bench_out, "output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify_cmd->parsed()) return run_classify(boundary_path, points_path, out_path, brute);
    if (assign_cmd->parsed()) return run_assign(mesh_path, grains_path, assign_out);
    if (solve_cmd->parsed()) return run_solve(config_path);
    if (mms_cmd->parsed()) return run_mms(mms_case, levels, mms_out);
    if (conf_cmd->parsed()) return run_conformalize(conf_mesh, conf_grains, conf_out);
    if (proj_cmd->parsed()) return run_project(proj_ifm, proj_source, proj_field, proj_out);
    if (bench_cmd->parsed()) return run_bench(sizes, grid, runs, bench_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const TopologyError& e) {
    std::cerr << "topology error: " << e.what() << "\n";
    return 4;
  } catch (const DegenerateGeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 4;
  } catch (const CoverageError& e) {
    std::cerr << "coverage error: " << e.what() << "\n";
    return 4;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 5;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 5;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
