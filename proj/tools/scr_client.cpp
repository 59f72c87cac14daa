#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  lanekeep::cli::ScrOptions opt;
  CLI::App app{"Drive a trained agent on an SCR race server"};
  lanekeep::cli::add_scr_options(app, opt);
  CLI11_PARSE(app, argc, argv);
  try {
    return lanekeep::cli::run_scr_client(opt);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
