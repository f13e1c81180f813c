#include "mmsync/csv.hpp"

#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mmsync/errors.hpp"

namespace mmsync {

namespace {

constexpr int kDigits = 17;

void write_complex_row(std::span<const cplx> row, std::ostream& out) {
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (k != 0) out << ',';
        out << row[k].real() << ',' << row[k].imag();
    }
    out << '\n';
}

std::vector<std::vector<cplx>> read_complex_rows(std::istream& in) {
    std::vector<std::vector<cplx>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::vector<double> fields;
        std::size_t column = 0;
        std::size_t start = 0;
        while (true) {
            ++column;
            const auto comma = line.find(',', start);
            const std::string cell = line.substr(start, comma - start);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            const bool trailing_ok = end != cell.c_str() &&
                                     cell.find_first_not_of(" \t", static_cast<std::size_t>(end - cell.c_str())) ==
                                         std::string::npos;
            if (!trailing_ok)
                throw CsvError(line_no, column, "row " + std::to_string(line_no) + ", column " +
                                                    std::to_string(column) + ": '" + cell + "' is not a number");
            fields.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() % 2 != 0)
            throw CsvError(line_no, fields.size(), "row " + std::to_string(line_no) + " has " +
                                                       std::to_string(fields.size()) +
                                                       " columns; expected re,im pairs");
        if (rows.empty()) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw CsvError(line_no, fields.size(), "row " + std::to_string(line_no) + " has " +
                                                       std::to_string(fields.size()) + " columns, expected " +
                                                       std::to_string(width));
        }
        std::vector<cplx> row(fields.size() / 2);
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = {fields[2 * k], fields[2 * k + 1]};
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvError(line_no == 0 ? 1 : line_no, 1, "no sample rows found");
    return rows;
}

}  // namespace

void write_block_csv(const ReceivedBlock& block, std::ostream& out) {
    const auto precision = out.precision(kDigits);
    for (std::size_t i = 0; i < block.chains(); ++i) write_complex_row(block.chain(i), out);
    out.precision(precision);
}

ReceivedBlock read_block_csv(std::istream& in) {
    const auto rows = read_complex_rows(in);
    ReceivedBlock block;
    block.samples.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            block.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    return block;
}

void write_training_csv(const TrainingBlock& t, std::ostream& out) {
    const auto precision = out.precision(kDigits);
    write_complex_row(t.symbols(), out);
    out.precision(precision);
}

TrainingBlock read_training_csv(std::istream& in) {
    auto rows = read_complex_rows(in);
    if (rows.size() != 1) throw CsvError(2, 1, "training CSV must contain exactly one row");
    try {
        return TrainingBlock(std::move(rows.front()));
    } catch (const InvalidParams& e) {
        throw CsvError(1, 1, std::string("training CSV: ") + e.what());
    }
}

void write_estimate_csv(const EstimateReport& est, std::ostream& out) {
    const std::size_t chains = est.alpha_hat.size();
    out << "cfo_hat,fft_size,peak_bin,peak_offset,noise_var_hat,snr_hat";
    for (std::size_t i = 1; i <= chains; ++i) out << ",alpha_hat_" << i;
    for (std::size_t i = 1; i <= chains; ++i) out << ",beta_hat_" << i;
    for (std::size_t i = 1; i <= chains; ++i) out << ",gamma_hat_" << i;
    out << '\n';

    const auto precision = out.precision(kDigits);
    out << est.cfo_hat << ',' << est.fft_size << ',' << est.peak_bin << ',' << est.peak_offset << ','
        << est.noise_var_hat << ',' << est.snr_hat;
    for (double a : est.alpha_hat) out << ',' << a;
    for (double b : est.beta_hat) out << ',' << b;
    for (double g : est.gamma_hat) out << ',' << g;
    out << '\n';
    out.precision(precision);
}

void write_crlb_csv(const CrlbReport& bounds, double snr_db, std::ostream& out) {
    const auto precision = out.precision(kDigits);
    out << "snr_db,parameter,bound\n";
    auto row = [&](const std::string& name, double value) { out << snr_db << ',' << name << ',' << value << '\n'; };
    for (std::size_t i = 0; i < bounds.var_alpha.size(); ++i) row("alpha_" + std::to_string(i + 1), bounds.var_alpha[i]);
    for (std::size_t i = 0; i < bounds.var_beta.size(); ++i) row("beta_" + std::to_string(i + 1), bounds.var_beta[i]);
    row("cfo", bounds.var_cfo);
    row("noise_var", bounds.var_noise_var);
    for (std::size_t i = 0; i < bounds.var_gamma.size(); ++i) row("gamma_" + std::to_string(i + 1), bounds.var_gamma[i]);
    row("snr", bounds.var_snr);
    out.precision(precision);
}

}  // namespace mmsync
