#include "iotc/parser.hpp"
#include "parser_support.hpp"

namespace iotc
{

using detail::register_decl;
using detail::report_violations;
using detail::TokenStream;

namespace
{

const std::set<std::string, std::less<>> kVocabKeywords{
  "structs", "resources", "sensors", "periodicSensors", "eventDrivenSensors",
  "requestBasedSensors", "tags", "actuators", "storages", "generate", "action",
  "accessed-by", "sample", "period", "for", "onCondition", "double", "long", "String",
};

class VocabParser
{
public:
  VocabParser(TokenStream & ts, VocabSection & out) : ts_(ts), out_(out) {}

  void run()
  {
    if (ts_.at_section("structs")) {
      ts_.expect_section("structs");
      while (ts_.at_name()) out_.structs.push_back(detail::parse_struct(ts_, out_.spans));
    }
    if (ts_.at_end()) {
      ts_.error(ts_.peek().span, diag::MissingSection, "at least one resource section required");
      return;
    }
    ts_.expect_section("resources");
    while (!ts_.at_end()) {
      if (ts_.at_section("sensors")) {
        ts_.expect_section("sensors");
        parse_sensor_groups();
      } else if (ts_.at_section("tags")) {
        ts_.expect_section("tags");
        while (ts_.at_name()) parse_tag();
      } else if (ts_.at_section("actuators")) {
        ts_.expect_section("actuators");
        while (ts_.at_name()) parse_actuator();
      } else if (ts_.at_section("storages")) {
        ts_.expect_section("storages");
        while (ts_.at_name()) parse_storage();
      } else {
        ts_.fail_expected({"'sensors:'", "'tags:'", "'actuators:'", "'storages:'"});
      }
    }
    if (out_.periodic_sensors.empty() && out_.event_sensors.empty() && out_.request_sensors.empty() &&
        out_.tags.empty() && out_.actuators.empty() && out_.storages.empty()) {
      ts_.error(ts_.peek().span, diag::MissingSection, "at least one resource section required");
    }
  }

private:
  void parse_sensor_groups()
  {
    bool any = false;
    while (true) {
      if (ts_.at_section("periodicSensors")) {
        ts_.expect_section("periodicSensors");
        while (ts_.at_name()) parse_periodic();
      } else if (ts_.at_section("eventDrivenSensors")) {
        ts_.expect_section("eventDrivenSensors");
        while (ts_.at_name()) parse_event();
      } else if (ts_.at_section("requestBasedSensors")) {
        ts_.expect_section("requestBasedSensors");
        while (ts_.at_name()) parse_request_sensor();
      } else {
        break;
      }
      any = true;
    }
    if (!any) {
      ts_.fail_expected({"'periodicSensors:'", "'eventDrivenSensors:'", "'requestBasedSensors:'"});
    }
  }

  const Token & component_name()
  {
    const Token & name = ts_.expect_name("component name");
    register_decl(ts_, out_.spans, span_key::decl("component", name.text), name, "component");
    return name;
  }

  // 'generate' Name ':' Struct
  MeasurementRef parse_generate(const std::string & owner)
  {
    ts_.expect_keyword("generate");
    MeasurementRef m;
    const Token & meas = ts_.expect_name("measurement name");
    out_.spans.emplace(span_key::member("component", owner, "generate", 0), meas.span);
    m.measurement = meas.text;
    ts_.expect(TokenKind::Colon, "':'");
    const Token & st = ts_.expect_name("struct name");
    m.struct_name = st.text;
    if (out_.find_struct(m.struct_name) == nullptr) {
      ts_.error(st.span, diag::UnresolvedStruct, "unknown struct '" + m.struct_name + "'");
    }
    return m;
  }

  // 'accessed-by' Name ':' type
  Param parse_accessed_by()
  {
    ts_.expect_keyword("accessed-by");
    Param p;
    p.name = ts_.expect_name("parameter name").text;
    ts_.expect(TokenKind::Colon, "':'");
    p.type = ts_.expect_type();
    return p;
  }

  ActionDecl parse_action(const std::string & owner, std::size_t index)
  {
    ts_.expect_keyword("action");
    ActionDecl a;
    const Token & name = ts_.expect_name("action name");
    a.name = name.text;
    out_.spans.emplace(span_key::member("component", owner, "action", index), name.span);
    a.params = detail::parse_param_list(ts_);
    ts_.expect(TokenKind::Semicolon, "';'");
    return a;
  }

  void parse_periodic()
  {
    PeriodicSensorDecl d;
    const Token & name = component_name();
    d.name = name.text;
    const SourceSpan span = name.span;
    d.generates = parse_generate(d.name);
    ts_.expect(TokenKind::Semicolon, "';'");
    ts_.expect_keyword("sample");
    ts_.expect_keyword("period");
    d.sample_period_s = ts_.expect_positive_int("sample period (seconds)");
    ts_.expect_keyword("for");
    d.duration_s = ts_.expect_positive_int("duration (seconds)");
    ts_.expect(TokenKind::Semicolon, "';'");
    report_violations(ts_, span, check_invariants(d));
    out_.periodic_sensors.push_back(std::move(d));
  }

  void parse_event()
  {
    EventDrivenSensorDecl d;
    d.name = component_name().text;
    d.generates = parse_generate(d.name);
    ts_.expect(TokenKind::Semicolon, "';'");
    ts_.expect_keyword("onCondition");
    const Token & field = ts_.expect_name("field name");
    d.condition.field = field.text;
    out_.spans.emplace(span_key::member("component", d.name, "condition", 0), field.span);
    const SourceSpan field_span = field.span;
    const Token & op = ts_.expect(TokenKind::Comparator, "comparator");
    d.condition.op = *parse_comparator(op.text);
    d.condition.literal = ts_.expect_number();
    ts_.expect(TokenKind::Semicolon, "';'");
    report_violations(ts_, field_span, check_invariants(d, out_.find_struct(d.generates.struct_name)));
    out_.event_sensors.push_back(std::move(d));
  }

  void parse_request_sensor()
  {
    RequestBasedSensorDecl d;
    d.name = component_name().text;
    d.generates = parse_generate(d.name);
    d.access_param = parse_accessed_by();
    ts_.expect(TokenKind::Semicolon, "';'");
    out_.request_sensors.push_back(std::move(d));
  }

  void parse_tag()
  {
    TagDecl d;
    d.name = component_name().text;
    d.generates = parse_generate(d.name);
    ts_.expect(TokenKind::Semicolon, "';'");
    out_.tags.push_back(std::move(d));
  }

  void parse_actuator()
  {
    ActuatorDecl d;
    const Token & name = component_name();
    d.name = name.text;
    const SourceSpan span = name.span;
    while (ts_.at_keyword("action")) d.actions.push_back(parse_action(d.name, d.actions.size()));
    report_violations(ts_, span, check_invariants(d));
    out_.actuators.push_back(std::move(d));
  }

  void parse_storage()
  {
    StorageDecl d;
    const Token & name = component_name();
    d.name = name.text;
    const SourceSpan span = name.span;
    d.generates = parse_generate(d.name);
    d.accessed_by = parse_accessed_by();
    ts_.expect(TokenKind::Semicolon, "';'");
    d.insert_action = parse_action(d.name, 0);
    report_violations(ts_, span, check_invariants(d));
    out_.storages.push_back(std::move(d));
  }

  TokenStream & ts_;
  VocabSection & out_;
};

}  // namespace

Result<VocabSection> parse_vocab(std::string_view source, std::string_view file)
{
  return detail::run_parser<VocabSection>(source, file, kVocabKeywords,
                                          [](TokenStream & ts, VocabSection & out) {
                                            VocabParser(ts, out).run();
                                          });
}

}  // namespace iotc
