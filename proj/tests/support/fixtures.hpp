#pragma once

// Byte builders, table helpers and brute-force oracles shared by the unit and
// acceptance suites.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sprawl/dtree.hpp"
#include "sprawl/ingest/shapefile.hpp"
#include "sprawl/table.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return SPRAWL_DATA_DIR; }
inline std::filesystem::path golden_dir() { return SPRAWL_GOLDEN_DIR; }

class ByteWriter {
 public:
  void be32(std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int s = 24; s >= 0; s -= 8) bytes_.push_back(static_cast<std::byte>(u >> s));
  }
  void le32(std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int s = 0; s < 32; s += 8) bytes_.push_back(static_cast<std::byte>(u >> s));
  }
  void le16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::byte>(v));
    bytes_.push_back(static_cast<std::byte>(v >> 8));
  }
  void f64(double v) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    for (int s = 0; s < 64; s += 8) bytes_.push_back(static_cast<std::byte>(u >> s));
  }
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<std::byte>(v)); }
  void text(const std::string& s, std::size_t width, char pad = ' ', bool right = false) {
    std::string cell = s.substr(0, width);
    const std::string fill(width - cell.size(), pad);
    cell = right ? fill + cell : cell + fill;
    for (char c : cell) bytes_.push_back(static_cast<std::byte>(c));
  }
  void append(const std::vector<std::byte>& more) { bytes_.insert(bytes_.end(), more.begin(), more.end()); }

  std::vector<std::byte>& bytes() { return bytes_; }

 private:
  std::vector<std::byte> bytes_;
};

// Writes spec-conformant polygon shapefiles.
class ShpBuilder {
 public:
  ShpBuilder& polygon(const std::vector<sprawl::ingest::Ring>& rings) {
    records_.push_back({5, rings});
    return *this;
  }
  ShpBuilder& null_shape() {
    records_.push_back({0, {}});
    return *this;
  }
  ShpBuilder& shape_type(std::int32_t type, const std::vector<sprawl::ingest::Ring>& rings) {
    records_.push_back({type, rings});
    return *this;
  }

  std::vector<std::byte> bytes(std::int32_t file_code = 9994) const {
    ByteWriter body;
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    bool any = false;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      ByteWriter rec;
      const auto& r = records_[i];
      rec.le32(r.type);
      if (r.type != 0) {
        std::size_t points = 0;
        double rx0 = 0, ry0 = 0, rx1 = 0, ry1 = 0;
        bool first = true;
        for (const auto& ring : r.rings) {
          for (const auto& p : ring) {
            if (first) {
              rx0 = rx1 = p.lon;
              ry0 = ry1 = p.lat;
              first = false;
            }
            rx0 = std::min(rx0, p.lon);
            rx1 = std::max(rx1, p.lon);
            ry0 = std::min(ry0, p.lat);
            ry1 = std::max(ry1, p.lat);
            ++points;
          }
        }
        rec.f64(rx0);
        rec.f64(ry0);
        rec.f64(rx1);
        rec.f64(ry1);
        rec.le32(static_cast<std::int32_t>(r.rings.size()));
        rec.le32(static_cast<std::int32_t>(points));
        std::int32_t start = 0;
        for (const auto& ring : r.rings) {
          rec.le32(start);
          start += static_cast<std::int32_t>(ring.size());
        }
        for (const auto& ring : r.rings) {
          for (const auto& p : ring) {
            rec.f64(p.lon);
            rec.f64(p.lat);
          }
        }
        if (!any) {
          min_x = rx0, min_y = ry0, max_x = rx1, max_y = ry1;
          any = true;
        }
        min_x = std::min(min_x, rx0);
        min_y = std::min(min_y, ry0);
        max_x = std::max(max_x, rx1);
        max_y = std::max(max_y, ry1);
      }
      body.be32(static_cast<std::int32_t>(i + 1));
      body.be32(static_cast<std::int32_t>(rec.bytes().size() / 2));
      body.append(rec.bytes());
    }
    ByteWriter out;
    out.be32(file_code);
    for (int i = 0; i < 5; ++i) out.be32(0);
    out.be32(static_cast<std::int32_t>((100 + body.bytes().size()) / 2));
    out.le32(1000);
    out.le32(5);
    for (double v : {min_x, min_y, max_x, max_y, 0.0, 0.0, 0.0, 0.0}) out.f64(v);
    out.append(body.bytes());
    return out.bytes();
  }

 private:
  struct Record {
    std::int32_t type;
    std::vector<sprawl::ingest::Ring> rings;
  };
  std::vector<Record> records_;
};

struct DbfField {
  std::string name;
  char type = 'C';
  std::uint8_t length = 10;
};

class DbfBuilder {
 public:
  explicit DbfBuilder(std::vector<DbfField> fields) : fields_(std::move(fields)) {}

  DbfBuilder& record(std::vector<std::string> cells, bool deleted = false) {
    records_.push_back({std::move(cells), deleted});
    return *this;
  }

  std::vector<std::byte> bytes(int record_len_adjust = 0) const {
    ByteWriter out;
    out.u8(3);
    out.u8(124);
    out.u8(1);
    out.u8(1);
    out.le32(static_cast<std::int32_t>(records_.size()));
    const auto header_len = static_cast<std::uint16_t>(32 + 32 * fields_.size() + 1);
    std::size_t record_len = 1;
    for (const auto& f : fields_) record_len += f.length;
    out.le16(header_len);
    out.le16(static_cast<std::uint16_t>(static_cast<int>(record_len) + record_len_adjust));
    for (int i = 0; i < 20; ++i) out.u8(0);
    for (const auto& f : fields_) {
      out.text(f.name, 11, '\0');
      out.u8(static_cast<std::uint8_t>(f.type));
      for (int i = 0; i < 4; ++i) out.u8(0);
      out.u8(f.length);
      out.u8(0);
      for (int i = 0; i < 14; ++i) out.u8(0);
    }
    out.u8(0x0D);
    for (const auto& r : records_) {
      out.u8(r.deleted ? 0x2A : 0x20);
      for (std::size_t c = 0; c < fields_.size(); ++c) {
        const bool numeric = fields_[c].type == 'N' || fields_[c].type == 'F';
        out.text(r.cells[c], fields_[c].length, ' ', numeric);
      }
    }
    out.u8(0x1A);
    return out.bytes();
  }

 private:
  struct Record {
    std::vector<std::string> cells;
    bool deleted;
  };
  std::vector<DbfField> fields_;
  std::vector<Record> records_;
};

inline sprawl::ingest::Ring square(double x, double y, double side, bool clockwise = true) {
  if (clockwise) return {{x, y}, {x, y + side}, {x + side, y + side}, {x + side, y}, {x, y}};
  return {{x, y}, {x + side, y}, {x + side, y + side}, {x, y + side}, {x, y}};
}

// Table with key "id", the given continuous columns and a "Target" Y/N column.
// NaN cells become Missing.
inline sprawl::AttributeTable labeled_table(const std::vector<std::string>& names,
                                            const std::vector<std::vector<double>>& rows,
                                            const std::vector<char>& labels) {
  std::vector<sprawl::Column> columns{{"id", sprawl::ColumnKind::text}};
  for (const auto& n : names) columns.push_back({n, sprawl::ColumnKind::continuous});
  columns.push_back({"Target", sprawl::ColumnKind::categorical});
  sprawl::AttributeTable table(columns, "id");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<sprawl::Cell> cells{std::string("r") + std::to_string(r)};
    for (double v : rows[r]) {
      if (std::isnan(v)) {
        cells.emplace_back(sprawl::Missing{});
      } else {
        cells.emplace_back(v);
      }
    }
    cells.emplace_back(std::string(1, labels[r]));
    table.add_row(std::move(cells));
  }
  return table;
}

inline sprawl::tree::TrainingSet training_set(const std::vector<std::string>& names,
                                              const std::vector<std::vector<double>>& rows,
                                              const std::vector<char>& labels) {
  return sprawl::tree::TrainingSet::from_table(labeled_table(names, rows, labels), "Target");
}

// Exhaustive itemset support over every subset of the vocabulary.
inline std::map<std::vector<std::string>, std::size_t> brute_force_itemsets(
    const std::vector<std::vector<std::string>>& transactions, double min_support) {
  std::vector<std::string> vocab;
  for (const auto& t : transactions) vocab.insert(vocab.end(), t.begin(), t.end());
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  std::map<std::vector<std::string>, std::size_t> out;
  const double n = static_cast<double>(transactions.size());
  for (std::uint32_t mask = 1; mask < (1u << vocab.size()); ++mask) {
    std::vector<std::string> items;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      if (mask >> i & 1u) items.push_back(vocab[i]);
    }
    std::size_t count = 0;
    for (const auto& t : transactions) {
      if (std::includes(t.begin(), t.end(), items.begin(), items.end())) ++count;
    }
    if (static_cast<double>(count) / n >= min_support) out.emplace(items, count);
  }
  return out;
}

inline double brute_entropy(double n, double y) {
  const double total = n + y;
  double h = 0.0;
  for (double part : {n, y}) {
    if (part > 0.0) h -= part / total * std::log2(part / total);
  }
  return h;
}

struct BruteSplit {
  double gain = 0.0;
  double gain_ratio = 0.0;
};

// Gain and gain ratio of `value < threshold` on unit-weight rows without
// missing values.
inline BruteSplit brute_split(const std::vector<double>& values, const std::vector<sprawl::Label>& labels,
                              double threshold) {
  double ln = 0, ly = 0, rn = 0, ry = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool y = labels[i] == sprawl::Label::Y;
    if (values[i] < threshold) {
      (y ? ly : ln) += 1;
    } else {
      (y ? ry : rn) += 1;
    }
  }
  const double total = ln + ly + rn + ry;
  const double left = ln + ly;
  const double right = rn + ry;
  BruteSplit s;
  s.gain = brute_entropy(ln + rn, ly + ry) - left / total * brute_entropy(ln, ly) -
           right / total * brute_entropy(rn, ry);
  double split_info = 0.0;
  for (double part : {left, right}) {
    if (part > 0) split_info -= part / total * std::log2(part / total);
  }
  s.gain_ratio = split_info > 0 ? s.gain / split_info : 0.0;
  return s;
}

// Random labelled dataset with `attrs` continuous columns on a small grid so
// ties occur.
inline sprawl::tree::TrainingSet random_training_set(std::mt19937_64& rng, std::size_t rows, std::size_t attrs) {
  sprawl::tree::TrainingSet set;
  std::uniform_int_distribution<int> grid(0, 9);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t a = 0; a < attrs; ++a) set.attributes.push_back("a" + std::to_string(a));
  set.columns.assign(attrs, std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t a = 0; a < attrs; ++a) set.columns[a][r] = grid(rng);
    // Mostly driven by a0 so trees have structure, with label noise.
    const bool y = set.columns[0][r] >= 5 ? !coin(rng) || coin(rng) : coin(rng) && coin(rng);
    set.labels.push_back(y ? sprawl::Label::Y : sprawl::Label::N);
  }
  return set;
}

inline std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

// Counties where low birth rate, few gasoline stations and sprawl go together.
inline sprawl::AttributeTable figure7_table() {
  return labeled_table({"BirthRate", "GasolineStations", "HousingUnits"},
                       {{10.1, 31, 40000},
                        {11.4, 22, 150000},
                        {9.8, 40, 65000},
                        {10.9, 18, 120000},
                        {11.7, 45, 30000},
                        {8.9, 27, 99000},
                        {11.2, 80, 45000},
                        {13.5, 95, 210000},
                        {14.2, 60, 52000},
                        {12.8, 77, 88000}},
                       {'Y', 'Y', 'Y', 'Y', 'Y', 'Y', 'N', 'N', 'N', 'N'});
}

inline std::map<std::string, std::vector<double>> figure7_cuts() {
  return {{"BirthRate", {12.0}}, {"GasolineStations", {50.0}}, {"HousingUnits", {100000.0}}};
}

// Random baskets: up to 12 transactions over up to 8 items.
inline std::vector<std::vector<std::string>> random_baskets(std::mt19937_64& rng) {
  const std::size_t tx_count = 1 + rng() % 12;
  const std::size_t item_count = 1 + rng() % 8;
  const double density = 0.2 + 0.6 * static_cast<double>(rng() % 100) / 100.0;
  std::bernoulli_distribution take(density);
  std::vector<std::vector<std::string>> out;
  for (std::size_t t = 0; t < tx_count; ++t) {
    std::vector<std::string> tx;
    for (std::size_t i = 0; i < item_count; ++i) {
      if (take(rng)) tx.push_back(std::string(1, static_cast<char>('a' + i)));
    }
    if (tx.empty()) tx.push_back("a");
    out.push_back(std::move(tx));
  }
  return out;
}

inline std::size_t count_containing(const std::vector<std::vector<std::string>>& transactions,
                                    std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  std::size_t count = 0;
  for (const auto& t : transactions) {
    if (std::includes(t.begin(), t.end(), items.begin(), items.end())) ++count;
  }
  return count;
}

// Income separates 19 sprawl counties perfectly at 11713160; below it,
// employment share at 18.88 separates most of the rest.
struct Figure9Data {
  sprawl::AttributeTable train;
  sprawl::AttributeTable prune;
};

inline Figure9Data figure9_tables() {
  const std::vector<std::string> names{"TotalPersonalIncome", "Employed"};
  auto build = [&](std::size_t high_y, std::size_t low_n, std::size_t low_emp_y, std::size_t low_emp_n,
                   std::size_t strays, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<char> labels;
    for (std::size_t i = 0; i < high_y; ++i) {
      const double income = i == 0 ? 11713170.0 : 11713170.0 + static_cast<double>(rng() % 40000000);
      rows.push_back({income, 18.9 + static_cast<double>(rng() % 2000) / 100.0});
      labels.push_back('Y');
    }
    auto low_income = [&] { return 11713150.0 - static_cast<double>(rng() % 9000000); };
    for (std::size_t i = 0; i < low_n; ++i) {
      if (i == 0) {
        rows.push_back({11713150.0, 18.9});
        labels.push_back('N');
        continue;
      }
      rows.push_back({low_income(), 18.9 + static_cast<double>(rng() % 2000) / 100.0});
      labels.push_back('N');
    }
    for (std::size_t i = 0; i < strays; ++i) {
      rows.push_back({low_income(), 18.9 + static_cast<double>(rng() % 2000) / 100.0});
      labels.push_back('Y');
    }
    for (std::size_t i = 0; i < low_emp_y; ++i) {
      rows.push_back({low_income(), i == 0 ? 18.86 : 18.86 - static_cast<double>(rng() % 800) / 100.0});
      labels.push_back('Y');
    }
    for (std::size_t i = 0; i < low_emp_n; ++i) {
      rows.push_back({low_income(), 18.86 - static_cast<double>(rng() % 800) / 100.0});
      labels.push_back('N');
    }
    return labeled_table(names, rows, labels);
  };
  return {build(19, 61, 6, 1, 1, 9), build(8, 10, 3, 0, 0, 10)};
}

inline sprawl::tree::TrainParams figure9_params() {
  sprawl::tree::TrainParams p;
  p.min_leaf_instances = 2;
  p.max_depth = 2;
  return p;
}

}  // namespace fixtures
