// Stand-in for the external benchmark bridge. The first argument picks a
// behaviour so the client's failure paths can be exercised:
//   echo      answer every evaluate with accuracy 0.9
//   length    accuracy = 0.8 + 1e-4 * length of the architecture text
//   error     answer every evaluate with an error object
//   garbage   answer every evaluate with a non-JSON line
//   wrong-id  answer with an id that does not match the request
//   silent    handshake, then never answer
//   no-hello  exit before the handshake
//   record F  like echo, and append every received architecture text to F

#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

using nlohmann::json;

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "echo";
  if (mode == "no-hello") return 3;
  std::ofstream record;
  if (mode == "record" && argc > 2) record.open(argv[2], std::ios::app);

  std::string line;
  while (std::getline(std::cin, line)) {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::exception&) {
      std::cout << json{{"id", nullptr}, {"error", "malformed request"}}.dump() << std::endl;
      continue;
    }
    const std::string op = req.value("op", "");
    if (op == "hello") {
      std::cout << json{{"benchmark", "stub"}, {"version", "0.0"}}.dump() << std::endl;
      continue;
    }
    if (op != "evaluate") {
      std::cout << json{{"id", req.value("id", json())}, {"error", "unknown op"}}.dump() << std::endl;
      continue;
    }
    const json id = req["id"];
    const std::string arch = req.value("arch", "");
    if (mode == "silent") continue;
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
    } else if (mode == "error") {
      std::cout << json{{"id", id}, {"error", "shape mismatch"}}.dump() << std::endl;
    } else if (mode == "wrong-id") {
      std::cout << json{{"id", id.get<long long>() + 100}, {"accuracy", 0.9}}.dump() << std::endl;
    } else if (mode == "length") {
      std::cout << json{{"id", id}, {"accuracy", 0.8 + 1e-4 * static_cast<double>(arch.size())}}.dump()
                << std::endl;
    } else {
      if (record) record << arch << '\n' << std::flush;
      std::cout << json{{"id", id}, {"accuracy", 0.9}}.dump() << std::endl;
    }
  }
  return 0;
}
