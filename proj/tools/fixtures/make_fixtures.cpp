// Regenerates the bundled mesh and traces under the given directory.
#include "fixtures.hpp"

#include <surfsketch/io/obj.hpp>
#include <surfsketch/io/trace.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace surfsketch;

namespace {

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << path.string() << " (" << text.size() << " bytes)\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: surfsketch_make_fixtures <data-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  const fixtures::Rock rock;
  write(dir / "rock.obj", io::write_obj(rock.mesh()));
  write(dir / "task1.trace", io::write_trace(fixtures::task1_trace(rock)));
  write(dir / "task2.trace", io::write_trace(fixtures::task2_trace(rock)));
  write(dir / "rapid.trace", io::write_trace(fixtures::rapid_trace(rock)));
  return 0;
}
