// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli/cli.hpp"

#include <ostream>

#include "CLI11.hpp"
#include "cli/common.hpp"
#include "lyrnet/fetch/transport.hpp"

namespace lyrnet::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lyrnet: multi-task emotion classification of song lyrics", "lyrnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lyrnet 0.1.0");

  Action action;
  setup_generate(app, action);
  setup_import(app, action);
  setup_split(app, action);
  setup_fetch(app, action);
  setup_train(app, action);
  setup_evaluate(app, action);
  setup_predict(app, action);
  setup_ablate(app, action);
  setup_gradcheck(app, action);

  std::vector<const char*> argv{"lyrnet"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    err << e.what() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  const auto parsed = app.get_subcommands();
  const std::string usage = parsed.empty() ? app.help() : parsed.front()->help();
  Io io{out, err, args};
  try {
    action(io);
    return kOk;
  } catch (const CommandFailed& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << usage;
    return kUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return kDataError;
  } catch (const DivergenceError& e) {
    err << "training diverged: " << e.what() << "\n";
    return kDivergence;
  } catch (const fetch::TransportError& e) {
    err << "network error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace lyrnet::cli
