#pragma once

#include <string>

#include "types.hpp"

namespace selfonn {

// `sample_index,value` rows with indices counting up from 0
Signal read_record_csv(const std::string& path);
void write_record_csv(const std::string& path, const Signal& samples);

// `sample_index,symbol` rows; out-of-order rows are sorted with a warning
std::vector<std::pair<std::size_t, char>> read_annotation_csv(const std::string& path);
void write_annotation_csv(const std::string& path,
                          const std::vector<std::pair<std::size_t, char>>& annotations);

// loads both files and validates annotation indices against the record
EcgRecord ingest_csv(const std::string& record_path,
                     const std::string& annotation_path,
                     const std::string& patient_id, double sampling_rate);

}  // namespace selfonn
