#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "herzflow/cli.hpp"
#include "herzflow/io.hpp"

int main(int argc, char** argv) {
  using namespace herzflow::cli;
  CLI::App app{"Fourier-Herz solver and inequality checks for generalized Navier-Stokes systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config;
  auto* solve = app.add_subcommand("solve", "Solve from a JSON run configuration");
  solve->add_option("config", config, "configuration file")->required();
  auto* split = app.add_subcommand("split", "Frequency split and local existence time of the initial data");
  split->add_option("config", config, "configuration file")->required();
  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  verify->add_option("config", config, "configuration file")->required();
  int J = 0;
  auto* counter = app.add_subcommand("counterexample", "Partial sums of the chi^{-1} but not H^{1/2} example");
  counter->add_option("J", J, "last shell index, 0..60")->required();
  std::string tensor_out;
  auto* tensor = app.add_subcommand("export-tensor", "Write the Navier-Stokes coefficient tensor as sparse JSON");
  tensor->add_option("path", tensor_out, "output file (standard output when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const Streams s{std::cout, std::cerr};
  if (*solve)
    return with_config_file(config, s, [&](const auto& j, const auto& base) { return cmd_solve(j, base, s); });
  if (*split)
    return with_config_file(config, s, [&](const auto& j, const auto& base) { return cmd_split(j, base, s); });
  if (*verify) return with_config_file(config, s, [&](const auto& j, const auto&) { return cmd_verify(j, s); });
  if (*counter) return cmd_counterexample(J, s);
  const auto text = herzflow::io::tensor_to_json(herzflow::ns_tensor()).dump(2) + "\n";
  if (tensor_out.empty()) {
    std::cout << text;
    return kOk;
  }
  try {
    herzflow::io::write_text_file(tensor_out, text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
