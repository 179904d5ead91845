// Python bindings for the core library: enough to build a knowledge source,
// annotate text, score verdicts and drive the command line from Python.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "medmap/cli.h"
#include "medmap/errors.h"
#include "medmap/eval.h"
#include "medmap/matcher.h"
#include "medmap/textprep.h"
#include "medmap/thesaurus.h"
#include "medmap/translation.h"
#include "medmap/unicode.h"
#include "medmap/variants.h"

namespace py = pybind11;

namespace medmap {
namespace {

MatchOptions Options(const std::string& filter_mode, bool ignore_word_order) {
  MatchOptions o;
  o.filter_mode = ParseFilterMode(filter_mode);
  o.ignore_word_order = ignore_word_order;
  o.Validate();
  return o;
}

VariantGenerator Generator(const std::string& language, const std::string& rules) {
  auto gen = VariantGenerator::Identity(language);
  if (rules.empty()) return gen;
  std::istringstream in(rules);
  return gen.WithRules(VariantGenerator::LoadRules(in, "rules"));
}

py::dict AnnotationDict(const Annotation& a) {
  py::dict d;
  d["doc_id"] = a.doc_id;
  d["sentence"] = a.sentence;
  d["start"] = a.span.begin;
  d["end"] = a.span.end;
  d["surface"] = a.surface;
  d["cui"] = a.cui;
  d["score"] = a.score;
  d["term"] = a.term;
  return d;
}

}  // namespace
}  // namespace medmap

PYBIND11_MODULE(_core, m) {
  using namespace medmap;
  m.doc() = "Concept annotation of clinical notes against a terminology subset";

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("normalize_term", &NormalizeTerm, py::arg("text"), py::arg("fold_accents") = false);

  py::class_<KnowledgeSource>(m, "KnowledgeSource")
      .def_property_readonly("language", &KnowledgeSource::language)
      .def("__len__", &KnowledgeSource::size)
      .def("has_cui", [](const KnowledgeSource& ks, const std::string& cui) {
        return ks.HasCui(cui);
      })
      .def("preferred_term",
           [](const KnowledgeSource& ks, const std::string& cui) { return ks.PreferredTerm(cui); })
      .def("lookup_word",
           [](const KnowledgeSource& ks, const std::string& word) {
             std::vector<std::string> terms;
             for (StringId id : ks.LookupWord(ks.Normalize(word))) {
               terms.push_back(ks.string(id).term);
             }
             return terms;
           })
      .def("serialize", [](const KnowledgeSource& ks) {
        std::ostringstream out;
        SerializeKnowledgeSource(ks, out);
        return out.str();
      });

  m.def(
      "build_knowledge_source",
      [](const std::string& records, const std::string& language, bool disorders_only) {
        std::istringstream in(records);
        return BuildKnowledgeSource(ReadConceptRecords(in, "records"), language,
                                    disorders_only ? &SemanticGroupDef::Disorders() : nullptr);
      },
      py::arg("records"), py::arg("language"), py::arg("disorders_only") = true,
      "Build from CUI|LANG|TERM|PREF|SEMTYPE|SOURCE lines.");
  m.def("load_knowledge_source", [](const std::string& text) {
    std::istringstream in(text);
    return DeserializeKnowledgeSource(in);
  });

  m.def(
      "map_phrase",
      [](const KnowledgeSource& ks, const std::vector<std::string>& words,
         const std::string& filter_mode, bool ignore_word_order, const std::string& rules) {
        py::list out;
        for (const Mapping& mp :
             MapPhrase(ks, words, Generator(ks.language(), rules),
                       Options(filter_mode, ignore_word_order))) {
          py::dict d;
          d["score"] = mp.aggregate_score;
          d["cuis"] = mp.cuis();
          out.append(d);
        }
        return out;
      },
      py::arg("ks"), py::arg("words"), py::arg("filter_mode") = "strict",
      py::arg("ignore_word_order") = false, py::arg("rules") = "");

  m.def(
      "annotate",
      [](const KnowledgeSource& ks, const std::vector<std::string>& sentences,
         const std::string& doc_id, const std::string& filter_mode, bool ignore_word_order,
         const std::string& rules) {
        Document doc{doc_id, Domain::kOther, ks.language(), sentences};
        py::list out;
        for (const Annotation& a : Annotate(ks, doc, Generator(ks.language(), rules),
                                            Options(filter_mode, ignore_word_order))) {
          out.append(AnnotationDict(a));
        }
        return out;
      },
      py::arg("ks"), py::arg("sentences"), py::arg("doc_id") = "doc",
      py::arg("filter_mode") = "strict", py::arg("ignore_word_order") = false,
      py::arg("rules") = "");

  m.def(
      "classify",
      [](const std::string& surface, const std::string& cui, std::size_t start,
         const std::vector<std::tuple<std::size_t, std::size_t, std::string>>& system) {
        GoldAnnotation g{"doc", 0, {start, start + surface.size()}, surface, cui,
                         Domain::kOther, true};
        std::vector<Annotation> sys;
        for (const auto& [b, e, c] : system) {
          Annotation a;
          a.doc_id = "doc";
          a.span = {b, e};
          a.cui = c;
          sys.push_back(a);
        }
        return std::string(VerdictName(ClassifyMatch(g, sys).verdict));
      },
      py::arg("surface"), py::arg("cui"), py::arg("start"), py::arg("system"),
      "Verdict for one gold phrase against (start, end, cui) system spans.");

  m.def(
      "f_measure",
      [](std::optional<double> p, std::optional<double> r, double alpha) {
        return FMeasure(p, r, alpha);
      },
      py::arg("precision"), py::arg("recall"), py::arg("alpha") = 0.5);

  m.def(
      "translate",
      [](const std::map<std::string, std::string>& glossary, const std::string& sentence) {
        GlossaryTranslator g("src", "tgt");
        for (const auto& [k, v] : glossary) g.Add(k, v);
        return g.TranslateSentence(sentence);
      },
      py::arg("glossary"), py::arg("sentence"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::RunCli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a medmap command; returns (exit_code, stdout, stderr).");
}
