#include "vefs/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vefs {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
  size_t ncols;
};

CsvWriter::CsvWriter(const std::string &path, const std::vector<std::string> &columns)
    : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) throw std::runtime_error("cannot open " + path);
  impl_->ncols = columns.size();
  for (size_t i = 0; i < columns.size(); ++i)
    impl_->out << (i ? "," : "") << columns[i];
  impl_->out << "\n";
}

void CsvWriter::row(const std::vector<double> &values) {
  if (values.size() != impl_->ncols)
    throw std::runtime_error("csv row width mismatch");
  for (size_t i = 0; i < values.size(); ++i)
    impl_->out << (i ? "," : "") << format_double(values[i]);
  impl_->out << "\n";
}

CsvWriter::~CsvWriter() {
  impl_->out.flush();
  delete impl_;
}

void write_snapshot(const std::string &path, const std::string &field_name,
                    const Scal &data, double dt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "field " << field_name << "\n";
  out << "dims " << data.rows() << " " << data.cols() << "\n";
  out << "dt " << format_double(dt) << "\n";
  out << "layout row-major float64 little-endian\n";
  out << "data\n";
  // row-major: all columns of row i, then row i+1
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      const double v = data(i, j);
      out.write(reinterpret_cast<const char *>(&v), sizeof(double));
    }
}

Scal read_snapshot(const std::string &path, std::string &field_name, double &dt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string tok;
  in >> tok >> field_name;
  Eigen::Index rows, cols;
  in >> tok >> rows >> cols;
  in >> tok >> dt;
  std::string layout_line;
  in >> tok;
  std::getline(in, layout_line);
  std::getline(in, layout_line); // "data"
  Scal data(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char *>(&v), sizeof(double));
      data(i, j) = v;
    }
  if (!in) throw std::runtime_error("truncated snapshot " + path);
  return data;
}

void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << content;
}

std::string plot_script_text(const std::string &csv_name) {
  std::string s;
  s += "# gnuplot script; run: gnuplot plot.gp\n";
  s += "set datafile separator ','\n";
  s += "set key autotitle columnhead\n";
  s += "set terminal pngcairo size 1000,700\n";
  s += "set output 'surface_amplitude.png'\n";
  s += "set logscale y\n";
  s += "set xlabel 'time'; set ylabel 'surface amplitude'\n";
  s += "plot '" + csv_name + "' using 2:3 with lines\n";
  s += "set output 'field_norms.png'\n";
  s += "set ylabel 'field norms'\n";
  s += "plot '" + csv_name + "' using 2:4 with lines title 'u', \\\n";
  s += "     '" + csv_name + "' using 2:5 with lines title 'q', \\\n";
  s += "     '" + csv_name + "' using 2:6 with lines title 'phi', \\\n";
  s += "     '" + csv_name + "' using 2:7 with lines title 'sigma'\n";
  s += "set output 'contraction.png'\n";
  s += "set ylabel 'outer contraction factor'\n";
  s += "plot '" + csv_name + "' using 2:9 with linespoints\n";
  return s;
}

} // namespace vefs
