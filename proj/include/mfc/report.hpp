#pragma once

// Run reports: a structured JSON document that round-trips canonical Exprs, and a
// unicode display rendering that is for reading only.

#include <string>
#include <vector>

#include "json.hpp"
#include "mfc/geometry.hpp"

namespace mfc {

constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

// Local symbol numbering for one document. Symbols are emitted dependencies first, so
// a reader can intern them in order.
class SymbolTable {
public:
    int id(SymbolId s);
    Json symbols_json() const;
    Json metrics_json() const;

private:
    std::map<SymbolId, int> local_;
    std::vector<SymbolId> order_;
    std::vector<std::string> metrics_;
};

Json expr_to_json(const Expr& e, SymbolTable& st);
Json form_to_json(const DiffForm& f, SymbolTable& st);

// Rebuilds symbols from a document's "metrics" and "symbols" arrays.
class SymbolResolver {
public:
    explicit SymbolResolver(const Json& doc);
    SymbolId symbol(int local) const;
    Expr expr(const Json& j) const;
    DiffForm form(const Json& j) const;

private:
    std::vector<SymbolId> ids_;
};

class ReportFormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// unicode display
std::string display_symbol(SymbolId s);
std::string display(const Expr& e);
std::string display(const DiffForm& f);

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

class Report {
public:
    Report(std::string command, std::string theory);

    void add(const std::string& key, const Expr& e, const std::string& label = "");
    void add(const std::string& key, const std::vector<Expr>& es, const std::vector<std::string>& labels);
    void add(const std::string& key, const DiffForm& f, const std::string& label = "");
    // key -> object with one member per item; appends to an existing object
    void add_item(const std::string& key, const std::string& item, const Expr& e);
    void add_item(const std::string& key, const std::string& item, const DiffForm& f);
    void add_item(const std::string& key, const std::string& item, Json value, const std::string& text);
    void add_value(const std::string& key, Json value, const std::string& text);
    void add_checks(const std::vector<CheckResult>& checks);
    void note(const std::string& line);

    Json document() const;
    std::string text() const;

private:
    std::string command_, theory_;
    SymbolTable st_;
    Json body_ = Json::object();
    std::vector<std::string> lines_;
};

}  // namespace mfc
