// Writes a randomly initialized weight file, mainly for exercising `ymu detect`
// without a training pipeline.
//
// usage: make_random_weights <out-file> [num_classes] [seed]

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "ymu/model.hpp"
#include "ymu/weights.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || argc > 4) {
    std::cerr << "usage: " << argv[0] << " <out-file> [num_classes=4] [seed=0]\n";
    return 1;
  }
  const std::string out = argv[1];
  const int num_classes = argc > 2 ? std::atoi(argv[2]) : 4;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 0;
  if (num_classes < 1) {
    std::cerr << "num_classes must be >= 1\n";
    return 1;
  }
  try {
    const ymu::ModelGraph g = ymu::build_yolov5mu(num_classes);
    const ymu::WeightStore store = ymu::init_weights(g, seed);
    ymu::save_weights(store, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << out << " (" << num_classes << " classes, seed " << seed
            << ")\n";
  return 0;
}
