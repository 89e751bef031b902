#ifndef LANCASTER_LAB_SERIALIZE_HPP
#define LANCASTER_LAB_SERIALIZE_HPP

// JSON views of the library's results (nlohmann::json, found by ADL) and
// plot-ready CSV. CSV floats carry 17 significant digits with '.' decimals.

#include <ostream>

#include <json.hpp>

#include "lancaster_lab/gibbs.hpp"
#include "lancaster_lab/lancaster.hpp"
#include "lancaster_lab/measure.hpp"
#include "lancaster_lab/orthopoly.hpp"
#include "lancaster_lab/triplekernel.hpp"

namespace lancaster_lab {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const Params& params);
void to_json(Json& j, const Measure& measure);
void to_json(Json& j, const LancasterSequence& seq);
void to_json(Json& j, const BivariateLancaster& biv);
void to_json(Json& j, const HankelCheck& check);
void to_json(Json& j, const VerifyReport& report);
void to_json(Json& j, const ScanPoint& point);
void to_json(Json& j, const PositivityReport& report);
void to_json(Json& j, const EigenCheck& check);
void to_json(Json& j, const AutocorrFit& fit);
void to_json(Json& j, const GaussRule& rule);

/// t,x
void write_trace_csv(std::ostream& os, const ChainTrace& trace);
/// x,y,z,S_N,stabilized
void write_scan_csv(std::ostream& os, const PositivityReport& report);
/// node,weight
void write_quadrature_csv(std::ostream& os, const GaussRule& rule);

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_SERIALIZE_HPP
