// Writes a synthetic planted-commons corpus as generic_csv.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "varicart/synthetic.hpp"

int main(int argc, char** argv) {
  varicart::PlantedConfig c;
  std::string out;
  CLI::App app{"planted-commons corpus generator"};
  app.add_option("--out", out, "generic_csv output")->required();
  app.add_option("--instances", c.instances);
  app.add_option("--common-fraction", c.common_fraction)->check(CLI::Range(0.0, 1.0));
  app.add_option("--markers", c.markers_per_class);
  app.add_option("--neutral", c.neutral_words);
  app.add_option("--marker-rate", c.marker_rate)->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", c.seed);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    const auto ds = varicart::make_planted_dataset(c);
    std::ofstream o(out, std::ios::binary);
    if (!o) {
      std::cerr << "cannot write '" << out << "'\n";
      return 2;
    }
    varicart::write_generic_csv(o, ds);
    std::cerr << ds.size() << " instances, " << ds.common_count() << " common\n";
  } catch (const varicart::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
