#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ellset/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ellset: level-set toolkit for degenerate elliptic operators"};
  app.require_subcommand(1);

  ellset::RunConfig config;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", config.seed, "sampling seed");
    sub->add_option("--tol", config.tol, "ray-bisection tolerance");
    sub->add_option("--out", config.output_path, "output path (written atomically)");
    sub->add_option("--format", config.format, "output format: json or csv");
  };

  CLI::App* acdo = app.add_subcommand(
      "acdo", "signed distance from a matrix to the operator's null level set");
  acdo->add_option("--operator", config.operator_path, "operator spec JSON file")->required();
  acdo->add_option("--X", config.matrix_literal, "matrix literal, rows ';', entries ','")
      ->required();
  acdo->add_option("--x0", config.point_literal, "evaluation point, comma-separated");
  add_common(acdo);

  CLI::App* condition = app.add_subcommand(
      "condition", "sample the permuted-level-set excess over shrinking balls");
  condition->add_option("--operator", config.operator_path, "operator spec JSON file")->required();
  condition->add_option("--x0", config.point_literal, "ball center, comma-separated");
  condition->add_option("--t", config.schedule_literal, "decreasing radii, comma-separated");
  condition->add_option("--pairs", config.pairs, "point pairs per radius");
  condition->add_option("--samples", config.samples, "level-set samples per pair");
  add_common(condition);

  CLI::App* matrixineq =
      app.add_subcommand("matrixineq", "stress the block and resolvent matrix inequalities");
  matrixineq->add_option("--trials", config.trials, "random instances");
  add_common(matrixineq);

  CLI::App* counterexample = app.add_subcommand(
      "counterexample", "build the planar comparison-failure certificate");
  counterexample->add_option("--grid", config.grid, "diamond grid resolution");
  counterexample->add_option("--edge-samples", config.edge_samples, "boundary samples per edge");
  counterexample->add_option("--residual-samples", config.residual_samples,
                             "off-axis residual sample count");
  counterexample->add_option("--axis-trials", config.axis_trials,
                             "touching quadratics attempted per side");
  add_common(counterexample);

  CLI::App* properties =
      app.add_subcommand("properties", "run the full acceptance property suite");
  add_common(properties);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  config.command = app.get_subcommands().front()->get_name();
  return ellset::run(config, std::cout, std::cerr);
}
