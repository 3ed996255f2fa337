#include "convexeff/records.hpp"

#include "convexeff/error.hpp"
#include "convexeff/io.hpp"

#include <istream>
#include <ostream>

namespace convexeff {

void write_trace_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
  out << "algorithm,seed,k_target,k_realized,step,complexity_bits,accuracy_bits,cost_bits,epsilon_bits,convexity\n";
  for (const auto& r : records) {
    out << io::csv_field(r.source) << ',' << r.seed << ',' << r.k_target << ',' << r.k << ',' << r.step << ','
        << io::fmt(r.complexity) << ',' << io::fmt(r.accuracy) << ',' << io::fmt(r.cost) << ','
        << io::fmt(r.epsilon) << ',' << io::fmt(r.convexity) << '\n';
  }
}

void write_evaluation_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
  out << "language,rotation,k,complexity_bits,accuracy_bits,cost_bits,epsilon_bits,beta_fit,convexity\n";
  for (const auto& r : records) {
    out << io::csv_field(r.source) << ',' << r.rotation << ',' << r.k << ',' << io::fmt(r.complexity) << ','
        << io::fmt(r.accuracy) << ',' << io::fmt(r.cost) << ',' << io::fmt(r.epsilon) << ',' << io::fmt(r.beta) << ','
        << io::fmt(r.convexity) << '\n';
  }
}

std::vector<EvalRecord> read_evaluation_csv(std::istream& in) {
  const io::CsvTable t = io::read_csv(in);
  const std::size_t c_lang = t.column("language"), c_rot = t.column("rotation"), c_k = t.column("k"),
                    c_cx = t.column("complexity_bits"), c_acc = t.column("accuracy_bits"),
                    c_cost = t.column("cost_bits"), c_eps = t.column("epsilon_bits"), c_beta = t.column("beta_fit"),
                    c_conv = t.column("convexity");
  std::vector<EvalRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    EvalRecord r;
    r.source = row.at(c_lang);
    r.rotation = static_cast<int>(io::parse_int(row.at(c_rot)));
    r.k = static_cast<std::size_t>(io::parse_int(row.at(c_k)));
    r.complexity = io::parse_double(row.at(c_cx));
    r.accuracy = io::parse_double(row.at(c_acc));
    r.cost = io::parse_double(row.at(c_cost));
    r.epsilon = io::parse_double(row.at(c_eps));
    r.beta = io::parse_double(row.at(c_beta));
    r.convexity = io::parse_double(row.at(c_conv));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace convexeff
