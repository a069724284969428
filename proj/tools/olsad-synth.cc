// tools/olsad-synth.cc

// Copyright 2026  The olsad Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "olsad/synth-corpus.h"

using namespace olsad;

int main(int argc, char **argv) {
  CLI::App app{"olsad-synth: write a synthetic two-class corpus"};
  std::string dir, manifest;
  int n_files = 30;
  uint64_t seed = 1;
  SynthConfig cfg;
  bool background = false;
  app.add_option("--out-dir", dir, "output directory")->required();
  app.add_option("--manifest", manifest, "manifest path (default <out-dir>/manifest.tsv)");
  app.add_option("--files", n_files, "number of files")->capture_default_str();
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  app.add_option("--duration", cfg.duration, "seconds per file")->capture_default_str();
  app.add_option("--sample-rate", cfg.sample_rate, "Hz")->capture_default_str();
  app.add_option("--min-snr", cfg.min_snr_db, "dB")->capture_default_str();
  app.add_option("--max-snr", cfg.max_snr_db, "dB")->capture_default_str();
  app.add_flag("--background-only", background, "background noise files, all non-speech");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (n_files < 1 || !(cfg.duration > 0.0) || cfg.sample_rate < kMinSampleRate) {
    std::cerr << "usage error: --files >= 1, --duration > 0, --sample-rate >= "
              << kMinSampleRate << "\n";
    return 1;
  }
  try {
    std::vector<LabeledAudio> files;
    if (background) {
      Rng seeds(seed);
      for (int i = 0; i < n_files; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "background%03d", i);
        files.push_back(GenerateBackgroundFile(cfg, seeds.Next(), name));
      }
    } else {
      files = GenerateSynthCorpus(cfg, n_files, seed);
    }
    const auto entries = WriteCorpus(files, dir);
    if (manifest.empty()) manifest = (std::filesystem::path(dir) / "manifest.tsv").string();
    WriteManifest(entries, manifest);
    std::cout << "wrote " << files.size() << " files and " << manifest << "\n";
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
