#pragma once

#include <string>
#include <vector>

#include "wpg/catalog.hpp"
#include "wpg/tree.hpp"

namespace fixtures {

// Missed call -> voice to text -> {SMS, Drive spreadsheet}.
inline wpg::Wast w0() {
  using namespace wpg::expr;
  return workflow(sequence(call("Android", "Any_Missed_Phone"),
                           call("Watson_API", "Voice_to_Text",
                                chained_split({call("SMS", "Send_Text_to_Me"),
                                               call("Google_Drive", "Archive_Text_in_Spread_Sheet")}))));
}

inline const std::string kW0Formal =
    "Sequence(Android.Any_Missed_Phone, Parallel_Split(Watson_API.Voice_to_Text, SMS.Send_Text_to_Me, "
    "Google_Drive.Archive_Text_in_Spread_Sheet))";

inline const std::string kW0Nl =
    "If any missed phone call occurs on Android, then convert the voice message to text with Watson API, "
    "and separately send the text to me by SMS, and finally archive the text in a Google Drive spreadsheet.";

// The four functions of the running example and nothing else.
inline const wpg::Catalog& figure_catalog() {
  static const wpg::Catalog c = wpg::builtin_demo_catalog().restricted_to(wpg::example_workflow_functions());
  return c;
}

struct TableRow {
  const char* frontier;
  const char* action;
};

// The expansion table, row by row.
inline const std::vector<TableRow>& expansion_table() {
  static const std::vector<TableRow> rows = {
      {"stmt root", "Workflow(wpg pattern)"},
      {"wpg pattern", "Sequence(func? trigger, func action)"},
      {"func? trigger", "Call(type channel, wpg? next)"},
      {"type channel", "SelectMacr[Android]"},
      {"Android", "SelectMacr[Any_Missed_Phone]"},
      {"wpg? next", "StopExpnsn(close the frontier field)"},
      {"func action", "Call(type channel, wpg? next)"},
      {"type channel", "SelectMacr[Watson_API]"},
      {"Watson_API", "SelectMacr[Voice_to_Text]"},
      {"wpg? next", "Parallel_Split(func? trigger, func* action)"},
      {"func? trigger", "StopExpnsn(close the frontier field)"},
      {"func* action", "Call(type channel, wpg? next)"},
      {"type channel", "SelectMacr[SMS]"},
      {"SMS", "SelectMacr[Send_Text_to_Me]"},
      {"wpg? next", "StopExpnsn(close the frontier field)"},
      {"func* action", "Call(type channel, wpg? next)"},
      {"type channel", "SelectMacr[Google_Drive]"},
      {"Google_Drive", "SelectMacr[Archive_Text_in_Spread_Sheet]"},
      {"wpg? next", "StopExpnsn(close the frontier field)"},
      {"func* action", "StopExpnsn(close the frontier field)"},
  };
  return rows;
}

}  // namespace fixtures
