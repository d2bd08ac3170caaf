#include "bcn/report.hpp"

#include <algorithm>

namespace bcn {

namespace {

std::string render_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  const auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += " | ";
      line += row[c];
      if (c + 1 < row.size()) line.append(width[c] - row[c].size(), ' ');
    }
    out += line + '\n';
  };
  emit(rows.front());
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) {
    if (c > 0) rule += "-+-";
    rule.append(width[c], '-');
  }
  out += rule + '\n';
  for (std::size_t i = 1; i < rows.size(); ++i) emit(rows[i]);
  return out;
}

}  // namespace

std::string delta_label(std::size_t dim, std::size_t index) {
  return "delta_" + std::to_string(dim) + "^" + std::to_string(index);
}

std::string render_schedule(const ScheduleTable& table, std::size_t state_count,
                            std::size_t control_count) {
  std::vector<std::vector<std::string>> rows;
  if (table.kind == NetworkClass::deterministic) {
    rows.push_back({"initial state", "sampling times", "control"});
    for (const auto& row : table.rows) {
      std::string times, controls;
      for (std::size_t k = 0; k < row.entries.size(); ++k) {
        const auto& e = row.entries[k];
        if (k > 0) {
          times += ", ";
          controls += ", ";
        }
        times += "t" + std::to_string(k) + "=" + std::to_string(e.t);
        controls += "u(t" + std::to_string(k) + ")=" + delta_label(control_count, e.control);
      }
      rows.push_back({delta_label(state_count, row.initial_state), times, controls});
    }
    return render_rows(rows);
  }
  const bool markov = table.kind == NetworkClass::markovian;
  if (markov) rows.push_back({"state", "mode", "tau", "control", "capped"});
  else rows.push_back({"state", "tau", "control", "capped"});
  for (const auto& row : table.rows) {
    const auto& e = row.entries.front();
    std::vector<std::string> cells{delta_label(state_count, row.initial_state)};
    if (markov) cells.push_back(std::to_string(row.mode.value_or(1)));
    cells.push_back(e.tau ? std::to_string(*e.tau) : "inf");
    cells.push_back(delta_label(control_count, e.control));
    cells.push_back(row.capped ? "yes" : "no");
    rows.push_back(std::move(cells));
  }
  return render_rows(rows);
}

}  // namespace bcn
