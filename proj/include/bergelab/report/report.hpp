#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergelab/checkers/verdict.hpp"
#include "bergelab/inventory/solver.hpp"
#include "bergelab/minimax/minimax.hpp"
#include "bergelab/parametric/transforms.hpp"

namespace bergelab {

/** @brief Shortest round-trip text for double; exact scalar text otherwise. */
template <class T>
std::string scalar_text(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
      std::snprintf(buf, sizeof buf, "%.*g", prec, v);
      if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
  } else {
    return ScalarTraits<T>::str(v);
  }
}

template <class T>
std::string ext_text(const ExtReal<T>& v) {
  return v.is_finite() ? scalar_text(v.value()) : v.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw IoError("report", "csv", "row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(cells[i]);
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::size_t columns_;
  std::ostringstream out_;
};

template <class T>
std::string join_scalars(const std::vector<T>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ';';
    s += scalar_text(vs[i]);
  }
  return s;
}

/** @brief Stable JSON text: sorted keys, two-space indent, trailing newline. */
inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("report", "write", "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("report", "write", "failed writing " + path.string());
}

/**
 * @brief Output directory filled in a staging sibling and moved into place by commit().
 * Payload files are deterministic; the timestamp lives only in metadata.json.
 */
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path target) : target_(std::move(target)) {
    namespace fs = std::filesystem;
    staging_ = target_;
    staging_ += ".partial";
    std::error_code ec;
    fs::remove_all(staging_, ec);
    if (!fs::create_directories(staging_, ec) || ec)
      throw IoError("report", "output_dir", "cannot create " + staging_.string() + (ec ? ": " + ec.message() : ""));
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (!committed_) {
      std::error_code ec;
      std::filesystem::remove_all(staging_, ec);
    }
  }

  void write(const std::string& name, const std::string& text) {
    write_text_file(staging_ / name, text);
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }

  void commit(const nlohmann::json& run_info) {
    namespace fs = std::filesystem;
    nlohmann::json meta = run_info;
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta["timestamp"] = buf;
    meta["files"] = files_;
    write_text_file(staging_ / "metadata.json", json_text(meta));
    std::error_code ec;
    if (fs::exists(target_)) fs::remove_all(target_, ec);
    if (ec) throw IoError("report", "output_dir", "cannot replace " + target_.string() + ": " + ec.message());
    fs::rename(staging_, target_, ec);
    if (ec) throw IoError("report", "output_dir", "cannot move output into " + target_.string() + ": " + ec.message());
    committed_ = true;
  }

  const std::filesystem::path& path() const { return target_; }

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

template <class T>
std::string profile_csv(const ValueProfile<T>& p) {
  CsvWriter w({"x", "value", "argmin_list"});
  for (std::size_t i = 0; i < p.xs.size(); ++i) w.row({scalar_text(p.xs[i]), ext_text(p.values[i]), join_scalars(p.argmins[i])});
  return w.str();
}

template <class T>
std::string verdict_summary_csv(const std::vector<Verdict<T>>& vs) {
  CsvWriter w({"property", "point", "status", "gap", "delta_min", "y_step", "depth"});
  for (const auto& v : vs)
    w.row({v.property, scalar_text(v.point), status_name(v.status), v.witness ? scalar_text(v.witness->gap) : "",
           scalar_text(v.resolution.delta_min), scalar_text(v.resolution.y_step), std::to_string(v.resolution.depth)});
  return w.str();
}

/** @brief One row per (stage, x): value and chosen order (empty where the state is outside the valid region). */
inline std::string value_table_csv(const ValueTable& t) {
  CsvWriter w({"stage", "x", "value", "order"});
  for (int s = 0; s <= t.horizon(); ++s) {
    const auto& row = t.values[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < t.xs.size(); ++i) {
      bool valid = i >= t.valid_from[static_cast<std::size_t>(s)];
      std::string order = valid && s > 0 ? scalar_text(t.policy[static_cast<std::size_t>(s)][i]) : "";
      w.row({std::to_string(s), scalar_text(t.xs[i]), valid ? scalar_text(row[i]) : "", order});
    }
  }
  return w.str();
}

template <class T>
std::string worst_loss_csv(const MinimaxProfile<T>& p) {
  CsvWriter w({"x", "a", "worst_loss"});
  for (const auto& [x, a, v] : p.surface) w.row({scalar_text(x), scalar_text(a), ext_text(v)});
  return w.str();
}

template <class T>
std::string minimax_csv(const MinimaxProfile<T>& p) {
  CsvWriter w({"x", "minimax", "argmin_list"});
  for (std::size_t i = 0; i < p.xs.size(); ++i) w.row({scalar_text(p.xs[i]), ext_text(p.values[i]), join_scalars(p.a_star[i])});
  return w.str();
}

/** @brief Long-format plot data: series, x, value. */
class PlotData {
 public:
  void add(const std::string& series, const std::string& x, const std::string& value) { w_.row({series, x, value}); }
  std::string str() const { return w_.str(); }

 private:
  CsvWriter w_{{"series", "x", "value"}};
};

template <class T>
PlotData plot_data(const ValueProfile<T>& p, const std::string& series = "value") {
  PlotData d;
  for (std::size_t i = 0; i < p.xs.size(); ++i) d.add(series, scalar_text(p.xs[i]), ext_text(p.values[i]));
  return d;
}

inline PlotData plot_data(const ValueTable& t) {
  PlotData d;
  for (int s = 0; s <= t.horizon(); ++s)
    for (std::size_t i = t.valid_from[static_cast<std::size_t>(s)]; i < t.xs.size(); ++i)
      d.add("stage_" + std::to_string(s), scalar_text(t.xs[i]), scalar_text(t.values[static_cast<std::size_t>(s)][i]));
  return d;
}

template <class T>
PlotData plot_data(const MinimaxProfile<T>& p) {
  PlotData d;
  for (std::size_t i = 0; i < p.xs.size(); ++i) d.add("minimax", scalar_text(p.xs[i]), ext_text(p.values[i]));
  return d;
}

/**
 * @brief Upper boundary of Gr(Phi) for each of the four feasibility variants over [x_lo, x_hi]
 * (lower boundary is 0 throughout). States above M are skipped for the finite-capacity variants.
 */
inline PlotData feasibility_boundaries(double L, double M, const Grid1D<double>& xs) {
  if (!(L > 0) || !std::isfinite(L) || !(M > 0) || !std::isfinite(M))
    throw ValidationError("report", "emit_plot_data", "feasibility boundaries need finite positive L and M");
  PlotData d;
  for (auto v : {InventoryVariant::BoundedOrdersBoundedCapacity, InventoryVariant::UnlimitedOrdersBoundedCapacity,
                 InventoryVariant::BoundedOrdersUnlimitedCapacity, InventoryVariant::UnlimitedOrdersUnlimitedCapacity}) {
    for (double x : xs.points()) {
      double hi = kInf;
      switch (v) {
        case InventoryVariant::BoundedOrdersBoundedCapacity:
          if (x > M) continue;
          hi = std::min(L, M - x);
          break;
        case InventoryVariant::UnlimitedOrdersBoundedCapacity:
          if (x > M) continue;
          hi = M - x;
          break;
        case InventoryVariant::BoundedOrdersUnlimitedCapacity:
          hi = L;
          break;
        case InventoryVariant::UnlimitedOrdersUnlimitedCapacity:
          break;
      }
      d.add(variant_name(v), scalar_text(x), scalar_text(hi));
    }
  }
  return d;
}

inline void emit_plot_data(const PlotData& d, const std::filesystem::path& path) { write_text_file(path, d.str()); }

}  // namespace bergelab
