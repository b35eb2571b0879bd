// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "dcal/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "dcal/emit.hpp"
#include "dcal/error.hpp"

namespace dcal {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !field.empty();
}

[[noreturn]] void fail(long line_no, const std::string& what) {
  throw InputError("line " + std::to_string(line_no) + ": " + what);
}

double field_double(const std::vector<std::string>& fields, std::size_t idx,
                    long line_no, const char* name) {
  double v = 0.0;
  if (!parse_double(fields[idx], v)) {
    fail(line_no, std::string("cannot parse ") + name + " '" + fields[idx] +
                      "'");
  }
  return v;
}

int field_state(const std::vector<std::string>& fields, std::size_t idx,
                long line_no) {
  double v = field_double(fields, idx, line_no, "state");
  if (v != 0.0 && v != 1.0) fail(line_no, "state must be 0 or 1");
  return static_cast<int>(v);
}

// Generic row reader: skips blank lines and an optional non-numeric header.
template <typename Row, typename ParseRow>
std::vector<Row> read_rows(std::istream& in, std::size_t min_fields,
                           std::size_t max_fields, ParseRow parse_row) {
  std::vector<Row> rows;
  std::string line;
  long line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> fields = split_fields(t);
    if (first_content) {
      first_content = false;
      double probe = 0.0;
      if (!parse_double(fields[0], probe)) continue;  // header line
    }
    if (fields.size() < min_fields || fields.size() > max_fields) {
      fail(line_no, "expected " + std::to_string(min_fields) +
                        (max_fields > min_fields ? "-" +
                                                       std::to_string(
                                                           max_fields)
                                                 : "") +
                        " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back(parse_row(fields, line_no));
  }
  return rows;
}

}  // namespace

std::vector<Sample> read_samples_csv(std::istream& in) {
  return read_rows<Sample>(
      in, 2, 3, [](const std::vector<std::string>& f, long line_no) {
        Sample s;
        s.prediction = field_double(f, 0, line_no, "prediction");
        s.state = field_state(f, 1, line_no);
        s.weight = f.size() > 2 ? field_double(f, 2, line_no, "weight") : 1.0;
        if (!(s.prediction >= 0.0 && s.prediction <= 1.0)) {
          fail(line_no, "prediction out of [0,1]");
        }
        if (!(s.weight >= 0.0)) fail(line_no, "negative weight");
        return s;
      });
}

std::vector<CouplingAtom> read_coupling_csv(std::istream& in) {
  return read_rows<CouplingAtom>(
      in, 4, 4, [](const std::vector<std::string>& f, long line_no) {
        CouplingAtom a;
        a.q = field_double(f, 0, line_no, "q");
        a.b = field_double(f, 1, line_no, "b");
        a.state = field_state(f, 2, line_no);
        a.mass = field_double(f, 3, line_no, "mass");
        if (!(a.q >= 0.0 && a.q <= 1.0 && a.b >= 0.0 && a.b <= 1.0)) {
          fail(line_no, "prediction out of [0,1]");
        }
        if (!(a.mass >= 0.0)) fail(line_no, "negative mass");
        return a;
      });
}

void write_samples_csv(std::ostream& out, const std::vector<Sample>& rows) {
  out << "prediction,state,weight\n";
  for (const Sample& s : rows) {
    out << format_g12(s.prediction) << ',' << s.state << ','
        << format_g12(s.weight) << '\n';
  }
}

void write_coupling_csv(std::ostream& out,
                        const std::vector<CouplingAtom>& rows) {
  out << "q,b,state,mass\n";
  for (const CouplingAtom& a : rows) {
    out << format_g12(a.q) << ',' << format_g12(a.b) << ',' << a.state << ','
        << format_g12(a.mass) << '\n';
  }
}

void write_joint_csv(std::ostream& out, const EmpiricalJoint& joint) {
  out << "prediction,state,weight\n";
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (joint.mass0()[i] > 0.0) {
      out << format_g12(joint.value(i)) << ",0,"
          << format_g12(joint.mass0()[i]) << '\n';
    }
    if (joint.mass1()[i] > 0.0) {
      out << format_g12(joint.value(i)) << ",1,"
          << format_g12(joint.mass1()[i]) << '\n';
    }
  }
}

}  // namespace dcal
