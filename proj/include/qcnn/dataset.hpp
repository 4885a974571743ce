#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qcnn {

// One preprocessed example, carrying both model views: 8 block-averaged
// features in [0, pi] for the quantum models and the 28x28 image in [0, 1]
// for the classical ones.
struct Sample {
    std::vector<double> features;
    std::vector<double> image;
    int label = 0; // 0 <-> digit_label0, 1 <-> digit_label1
    int source_digit = 0;
    int source_index = 0;
    bool from_test_file = false;
};

struct DatasetProvenance {
    std::map<std::string, std::string> file_digests; // filename -> sha256
    std::uint64_t subset_seed = 0;
    int train_size = 0;
    int test_size = 0;
    int digit_label0 = 0;
    int digit_label1 = 7;
    std::vector<std::string> warnings;
};

struct Dataset {
    std::vector<Sample> train;
    std::vector<Sample> test;
    DatasetProvenance provenance;
};

} // namespace qcnn
