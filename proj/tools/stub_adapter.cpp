// Adapter-protocol scorer driven by substring rules, for tests.
//   stub_adapter RULES.json [--delay-ms N] [--garbage] [--wrong-id]
#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "linetrust/model_store.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: stub_adapter RULES.json [--delay-ms N] [--garbage] [--wrong-id]\n";
    return 2;
  }
  int delay_ms = 0;
  bool garbage = false, wrong_id = false;
  for (int i = 2; i < argc; ++i) {
    if (std::strcmp(argv[i], "--delay-ms") == 0 && i + 1 < argc) delay_ms = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--garbage") == 0) garbage = true;
    else if (std::strcmp(argv[i], "--wrong-id") == 0) wrong_id = true;
  }
  auto rules = linetrust::RuleClassifier::from_json(
      linetrust::Json::parse(linetrust::read_text_file(argv[1])));

  std::string line;
  while (std::getline(std::cin, line)) {
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    if (garbage) {
      std::cout << "not json at all" << std::endl;
      continue;
    }
    auto req = linetrust::Json::parse(line, nullptr, false);
    if (req.is_discarded()) continue;
    auto id = req.value("id", std::uint64_t{0}) + (wrong_id ? 1 : 0);
    double score = rules.score(req.value("text", std::string{}));
    std::cout << linetrust::Json{{"id", id}, {"score", score}}.dump() << std::endl;
  }
  return 0;
}
