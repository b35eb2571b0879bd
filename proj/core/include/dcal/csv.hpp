// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dcal/model.hpp"

namespace dcal {

// Reads `prediction,state[,weight]` rows (UTF-8, '.' decimal separator).
// A single leading header line is skipped if its first field is not a
// number.  Rejected rows abort with the 1-based line number in the message.
std::vector<Sample> read_samples_csv(std::istream& in);

// Reads coupling rows `q,b,state,mass` under the same conventions.
std::vector<CouplingAtom> read_coupling_csv(std::istream& in);

void write_samples_csv(std::ostream& out, const std::vector<Sample>& rows);
void write_coupling_csv(std::ostream& out,
                        const std::vector<CouplingAtom>& rows);

// Writes a joint as prediction,state,weight rows (state 0 mass then state 1
// mass per value).
void write_joint_csv(std::ostream& out, const EmpiricalJoint& joint);

}  // namespace dcal
