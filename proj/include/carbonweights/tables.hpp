#pragma once

// The two published ratio tables, recomputed from the approximations.

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "carbonweights/dynamic_solver.hpp"
#include "carbonweights/static_solver.hpp"

namespace cw {

/// Half away from zero, two decimals.
inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline std::string format2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << round2(v);
    return os.str();
}

struct TableCell {
    std::string panel;  // "A" or "B"
    std::string row;
    double eta = 1.0;
    double damageRatio = 1.0;
    double value = 0.0;
};

inline constexpr double kTablePopulationRatioSN = 3.7;
inline constexpr double kTableEndowmentRatioNS = 3.2;

inline std::vector<TableCell> table1_cells() {
    std::vector<TableCell> cells;
    const double etas[] = {1.0, 1.5};
    const double damage[] = {0.5, 1.0, 2.0};
    for (double c : {0.5, 1.0, 2.0})
        for (double eta : etas)
            for (double d : damage) {
                std::ostringstream row;
                row << "c''_N/c''_S=" << c;
                cells.push_back({"A", row.str(), eta, d,
                                 ratio_approx_static(kTablePopulationRatioSN, 1.0 / kTableEndowmentRatioNS, d, c, eta)});
            }
    for (double wr : {1.0, 3.2, 6.4})
        for (double eta : etas)
            for (double d : damage) {
                std::ostringstream row;
                row << "w_N/w_S=" << wr;
                cells.push_back({"B", row.str(), eta, d, ratio_approx_static(kTablePopulationRatioSN, 1.0 / wr, d, 1.0, eta)});
            }
    return cells;
}

inline constexpr double kTableYears = 50.0;

inline std::vector<TableCell> table2_cells() {
    std::vector<TableCell> cells;
    const double etas[] = {1.0, 1.5};
    const double damage[] = {1.0, 2.0};
    // Panel A leaves income growth equal across regions; 2 percent is arbitrary
    // since only the ratio of growth factors enters.
    for (double gLS : {0.0, 0.01, 0.02})
        for (double eta : etas)
            for (double d : damage) {
                std::ostringstream row;
                row << "gL_S=" << gLS * 100 << "%,gL_N=0%";
                cells.push_back({"A", row.str(), eta, d,
                                 ratio_approx_dynamic(kTablePopulationRatioSN, 1.0 / kTableEndowmentRatioNS, d, 1.0,
                                                      gLS, 0.0, 0.02, 0.02, kTableYears, eta)});
            }
    for (double gwS : {0.02, 0.03, 0.04})
        for (double eta : etas)
            for (double d : damage) {
                std::ostringstream row;
                row << "gw_S=" << gwS * 100 << "%,gw_N=2%";
                cells.push_back({"B", row.str(), eta, d,
                                 ratio_approx_dynamic(kTablePopulationRatioSN, 1.0 / kTableEndowmentRatioNS, d, 1.0,
                                                      0.02, 0.0, gwS, 0.02, kTableYears, eta)});
            }
    return cells;
}

inline void write_table_csv(std::ostream& os, const std::vector<TableCell>& cells) {
    os << "panel,row,eta,damage_ratio_SN,ratio\n";
    for (const auto& c : cells)
        os << c.panel << ",\"" << c.row << "\"," << c.eta << ',' << c.damageRatio << ',' << format2(c.value) << '\n';
}

/// Layout of the printed tables: one line per row, eta blocks side by side.
inline void write_table_text(std::ostream& os, const std::vector<TableCell>& cells, std::size_t damageColumns) {
    std::string panel, row;
    const std::size_t perRow = 2 * damageColumns;
    for (std::size_t k = 0; k < cells.size(); k += perRow) {
        const auto& first = cells[k];
        if (first.panel != panel) {
            panel = first.panel;
            os << (panel == "A" ? "Panel A\n" : "Panel B\n");
        }
        os << "  " << std::left << std::setw(22) << first.row;
        for (std::size_t j = 0; j < perRow; ++j) {
            if (j == damageColumns) os << "  |";
            os << ' ' << format2(cells[k + j].value);
        }
        os << '\n';
    }
}

}  // namespace cw
